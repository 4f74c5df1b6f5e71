#pragma once

#include <optional>
#include <vector>

#include "alp/kernel.hpp"

namespace alp {

// standard      full smoothing operators at every level; the classical
//               coarse-to-fine residual scheme whose training error goes to
//               zero as the bandwidth shrinks
// auto_adaptive zero-diagonal operators during training, so the training
//               error curve estimates the leave-one-out error and its
//               minimum picks the stopping level
enum class LpVariant {
  standard,
  auto_adaptive,
};

const char* to_string(LpVariant variant);
LpVariant lp_variant_from_string(std::string_view name);

struct TrainOptions {
  // Initial bandwidth; defaults to 2 * median pairwise training distance.
  std::optional<double> sigma0;
  // Bandwidth shrink factor per level, sigma_l = sigma0 / mu^l. Must be > 1.
  double mu = 2.0;
  int max_iter = 50;
  LpVariant variant = LpVariant::auto_adaptive;
  // Operator construction during auto-adaptive training; ignored for the
  // standard variant, which always uses full operators. The default zeroes
  // the diagonal of the already-normalized operator: the dropped self weight
  // then damps corrections as the bandwidth falls below the sample spacing,
  // which keeps the training error curve tracking the leave-one-out error
  // instead of diverging. The renormalizing mode is kept for comparison.
  KernelMode kernel_mode = KernelMode::normalize_then_zero_diag;
  // Kernel is exp(-d^2 / (kernel_denom * sigma^2)).
  double kernel_denom = 1.0;
};

struct AlpModel {
  Matrix train_points;
  double sigma0 = 0.0;
  double mu = 2.0;
  KernelMode kernel_mode = KernelMode::normalize_then_zero_diag;
  LpVariant variant = LpVariant::auto_adaptive;
  double kernel_denom = 1.0;
  // residuals[l] is the level-l correction signal; residuals[0] is the raw
  // training target. Only levels up to max(optimal_iter) are kept.
  std::vector<Matrix> residuals;
  // Per output column, the 0-based level whose training error was smallest.
  // Prediction for output m sums levels 0..optimal_iter[m].
  std::vector<int> optimal_iter;

  Index outputs() const { return residuals.empty() ? 0 : residuals[0].cols(); }
  Index levels() const { return Index(residuals.size()); }
};

struct TrainReport {
  // error_curves[m][l] = mean squared training residual of output m after
  // applying levels 0..l. For the auto-adaptive variant this approximates
  // the leave-one-out error.
  std::vector<std::vector<double>> error_curves;
  std::vector<int> optimal_iter;
  std::vector<double> bandwidths;  // sigma used at each executed level
  int iterations = 0;              // executed levels
  bool kernel_underflow = false;   // stopped because a kernel row vanished
};

struct AlpTrainResult {
  AlpModel model;
  TrainReport report;
};

double default_sigma0(const Matrix& points);

// Trains a Laplacian pyramid on (points, targets), one pyramid per target
// column over shared operators. All max_iter levels are built unless the
// kernel underflows first or every output's error has dropped to the
// floating-point noise floor; each output's stopping level is then the argmin
// of its full error curve. Throws std::invalid_argument on malformed input
// and std::runtime_error when the kernel underflows at the very first level
// (sigma0 too small for the sample).
AlpTrainResult alp_train(const Matrix& points, const Matrix& targets,
                         const TrainOptions& options = {});

// Evaluates the trained pyramid at new points with full (smoothing)
// operators, summing levels 0..optimal_iter[m] for each output m.
Matrix alp_predict(const AlpModel& model, const Matrix& test_points);

// Brute-force leave-one-out cross-validation of the standard pyramid:
// retrains on the n-1 remaining points for every held-out point and records
// the held-out mean squared error after each level. Deliberately independent
// of alp_train so it can serve as an oracle; O(levels * n^3), capped at
// n = 2000.
std::vector<double> exact_loocv_curve(const Matrix& points, const Matrix& targets,
                                      double sigma0, double mu, int levels);

// Training error curve of the standard variant for exactly `levels` levels,
// no early stopping. err[l] is the mean squared residual over all points and
// outputs after level l.
std::vector<double> lp_train_error_curve(const Matrix& points, const Matrix& targets,
                                         double sigma0, double mu, int levels);

}  // namespace alp
