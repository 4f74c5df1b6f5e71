#pragma once

#include <string>
#include <string_view>

#include "alp/types.hpp"

namespace alp {

// How a kernel matrix is turned into a smoothing operator.
//
//   full                      rows normalized to sum 1, diagonal kept
//   zero_diag_then_normalize  diagonal removed first, then rows normalized;
//                             rows sum to 1 and row i ignores sample i, so
//                             training-set predictions are leave-one-out
//                             predictions
//   normalize_then_zero_diag  rows normalized first, then diagonal removed;
//                             row i sums to 1 - P_ii
enum class KernelMode {
  full,
  zero_diag_then_normalize,
  normalize_then_zero_diag,
};

const char* to_string(KernelMode mode);
KernelMode kernel_mode_from_string(std::string_view name);

struct SmoothingOperator {
  Matrix values;   // nonnegative weights, one row per evaluation point
  double scale = 0.0;
  KernelMode mode = KernelMode::full;
  // Set when at least one row's weight mass over its permitted columns (all
  // columns but the dropped diagonal) underflowed to zero. Such rows become
  // uniform over the permitted columns, except in normalize_then_zero_diag
  // mode where the surviving diagonal keeps the denominator alive and the
  // row is simply (numerically) zero. Callers use the flag to detect that
  // the bandwidth has shrunk below the sample spacing.
  bool degenerate_rows = false;
};

// Squared Euclidean distances, out(i, j) = |a_i - b_j|^2. Throws
// std::invalid_argument when the point dimensions differ.
Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);

// Elementwise exp(-d2 / (denom * sigma^2)). denom = 1 gives the smoothing
// kernel, denom = 2 the diffusion convention. sigma and denom must be > 0.
Matrix gaussian_kernel(const Matrix& sq_dists, double sigma, double denom = 1.0);

// Row-normalizes a nonnegative kernel matrix according to `mode`. The
// zero-diagonal modes require a square kernel. `scale` is carried through
// for bookkeeping only.
SmoothingOperator smoothing_operator(const Matrix& kernel, KernelMode mode,
                                     double scale = 0.0);

// out = op * values; op is R x N, values holds one column per output.
Matrix apply_operator(const Matrix& op, const Matrix& values);

// Buffer-reusing variants. Output arguments are resized as needed; when the
// shape already matches, no allocation happens, so a level loop can cycle a
// bandwidth schedule through the same storage. Results are bit-identical to
// the returning versions. Outputs must not alias the inputs.
void gaussian_kernel(const Matrix& sq_dists, double sigma, double denom,
                     Matrix& out);
void smoothing_operator(const Matrix& kernel, KernelMode mode, double scale,
                        SmoothingOperator& out);
void apply_operator(const Matrix& op, const Matrix& values, Matrix& out);

// Percentile of the n*(n-1)/2 pairwise Euclidean distances (nearest-rank on
// the sorted list). Needs at least two points.
double pairwise_distance_percentile(const Matrix& points, double percentile);
double median_pairwise_distance(const Matrix& points);

// Serial reference implementations of the parallel kernels above. They use
// the same per-row summation order, so results must match bit for bit; the
// test suite and the benchmark target hold them against the parallel ones.
namespace serial {

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b);
Matrix gaussian_kernel(const Matrix& sq_dists, double sigma, double denom = 1.0);
Matrix apply_operator(const Matrix& op, const Matrix& values);

}  // namespace serial

}  // namespace alp
