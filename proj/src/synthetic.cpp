#include "alp/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace alp {

Dataset composite_sine(Index n, double noise, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("composite_sine: need at least 2 points");
  }
  if (noise < 0.0) {
    throw std::invalid_argument("composite_sine: noise must be nonnegative");
  }
  const double hi = 10.0 * std::numbers::pi;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> jitter(-noise, noise);

  Dataset data;
  data.points.resize(n, 1);
  data.targets.resize(n, 1);
  for (Index i = 0; i < n; ++i) {
    const double x = hi * (double(i) / double(n - 1));
    double f = std::sin(x);
    // Higher harmonics switch on past each third of the interval; the
    // boundary itself is excluded.
    if (x > hi / 3.0) f += 0.5 * std::sin(3.0 * x);
    if (x > 2.0 * hi / 3.0) f += 0.25 * std::sin(9.0 * x);
    data.points(i, 0) = x;
    data.targets(i, 0) = f + (noise > 0.0 ? jitter(rng) : 0.0);
  }
  return data;
}

Split odd_even_split(const Matrix& points, const Matrix& targets) {
  if (points.rows() != targets.rows()) {
    throw std::invalid_argument("odd_even_split: row counts differ");
  }
  const Index n = points.rows();
  if (n < 2) {
    throw std::invalid_argument("odd_even_split: need at least 2 rows");
  }
  const Index n_train = (n + 1) / 2;
  const Index n_test = n / 2;

  Split split;
  split.train_points.resize(n_train, points.cols());
  split.train_targets.resize(n_train, targets.cols());
  split.test_points.resize(n_test, points.cols());
  split.test_targets.resize(n_test, targets.cols());
  for (Index i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      split.train_points.row(i / 2) = points.row(i);
      split.train_targets.row(i / 2) = targets.row(i);
    } else {
      split.test_points.row(i / 2) = points.row(i);
      split.test_targets.row(i / 2) = targets.row(i);
    }
  }
  return split;
}

SwissRoll swiss_roll(Index n, double noise, std::uint64_t seed) {
  if (n < 1) {
    throw std::invalid_argument("swiss_roll: need at least 1 point");
  }
  if (noise < 0.0) {
    throw std::invalid_argument("swiss_roll: noise must be nonnegative");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  SwissRoll roll;
  roll.points.resize(n, 3);
  roll.parameter.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double t = 1.5 * std::numbers::pi * (1.0 + 2.0 * unit(rng));
    const double h = 21.0 * unit(rng);
    roll.points(i, 0) = t * std::cos(t) + noise * gauss(rng);
    roll.points(i, 1) = h + noise * gauss(rng);
    roll.points(i, 2) = t * std::sin(t) + noise * gauss(rng);
    roll.parameter(i) = t;
  }
  return roll;
}

}  // namespace alp
