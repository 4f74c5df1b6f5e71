#pragma once

#include <cstdint>

#include "alp/types.hpp"

namespace alp {

struct Dataset {
  Matrix points;
  Matrix targets;
};

// Evenly spaced 1-d sample on [0, 10*pi] of
//   f(x) = sin(x) + 0.5 sin(3x) [x > 10pi/3] + 0.25 sin(9x) [x > 2*10pi/3]
// plus uniform noise on [-noise, noise]. Same seed, same data.
Dataset composite_sine(Index n, double noise, std::uint64_t seed);

struct Split {
  Matrix train_points;
  Matrix train_targets;
  Matrix test_points;
  Matrix test_targets;
};

// Rows 1, 3, 5, ... (1-based) become the training half, the rest the test
// half; deterministic, preserves order.
Split odd_even_split(const Matrix& points, const Matrix& targets);

struct SwissRoll {
  Matrix points;      // n x 3
  Vector parameter;   // intrinsic arc parameter of each point
};

// (t cos t, h, t sin t) with t = 1.5*pi*(1 + 2u), u ~ U[0,1], h ~ U[0,21],
// plus isotropic Gaussian jitter of the given standard deviation.
SwissRoll swiss_roll(Index n, double noise, std::uint64_t seed);

}  // namespace alp
