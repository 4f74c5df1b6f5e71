#include "alp/pyramid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace alp {

namespace {

// Residuals whose mean square falls below this multiple of the target scale
// are numerical noise; a level that reaches it no longer counts as an
// improvement, so exactly-representable targets cannot produce spurious
// minima at large level indices.
constexpr double kConvergenceFloor = 1e-30;

void check_training_input(const Matrix& points, const Matrix& targets) {
  if (points.rows() < 3) {
    throw std::invalid_argument("alp_train: need at least 3 training points");
  }
  if (targets.rows() != points.rows()) {
    throw std::invalid_argument("alp_train: points and targets row counts differ (" +
                                std::to_string(points.rows()) + " vs " +
                                std::to_string(targets.rows()) + ")");
  }
  if (targets.cols() < 1) {
    throw std::invalid_argument("alp_train: need at least one target column");
  }
  if (!points.allFinite() || !targets.allFinite()) {
    throw std::invalid_argument("alp_train: input contains non-finite values");
  }
}

void check_schedule(double sigma0, double mu, int levels) {
  if (!(sigma0 > 0.0)) {
    throw std::invalid_argument("bandwidth schedule: sigma0 must be positive");
  }
  if (!(mu > 1.0)) {
    throw std::invalid_argument("bandwidth schedule: mu must be greater than 1");
  }
  if (levels < 1) {
    throw std::invalid_argument("bandwidth schedule: need at least one level");
  }
}

// Same nearest-rank percentile as pairwise_distance_percentile, but reuses an
// already computed squared-distance matrix.
double percentile_from_sq_dists(const Matrix& sq, double percentile) {
  const Index n = sq.rows();
  std::vector<double> dists;
  dists.reserve(std::size_t(n) * std::size_t(n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) dists.push_back(std::sqrt(sq(i, j)));
  }
  auto rank = static_cast<std::ptrdiff_t>(
      std::llround(percentile / 100.0 * double(dists.size() - 1)));
  rank = std::clamp<std::ptrdiff_t>(rank, 0, std::ptrdiff_t(dists.size()) - 1);
  std::nth_element(dists.begin(), dists.begin() + rank, dists.end());
  return dists[std::size_t(rank)];
}

int argmin_curve(const std::vector<double>& curve) {
  int best = 0;
  for (int l = 1; l < int(curve.size()); ++l) {
    if (curve[std::size_t(l)] < curve[std::size_t(best)]) best = l;
  }
  return best;
}

}  // namespace

const char* to_string(LpVariant variant) {
  switch (variant) {
    case LpVariant::standard: return "standard";
    case LpVariant::auto_adaptive: return "auto-adaptive";
  }
  throw std::invalid_argument("to_string: unknown pyramid variant");
}

LpVariant lp_variant_from_string(std::string_view name) {
  if (name == "standard") return LpVariant::standard;
  if (name == "auto-adaptive") return LpVariant::auto_adaptive;
  throw std::invalid_argument("unknown pyramid variant '" + std::string(name) +
                              "'; expected standard or auto-adaptive");
}

double default_sigma0(const Matrix& points) {
  return 2.0 * median_pairwise_distance(points);
}

AlpTrainResult alp_train(const Matrix& points, const Matrix& targets,
                         const TrainOptions& options) {
  check_training_input(points, targets);
  if (options.sigma0 && !(*options.sigma0 > 0.0)) {
    throw std::invalid_argument("alp_train: sigma0 must be positive");
  }
  if (!(options.kernel_denom > 0.0)) {
    throw std::invalid_argument("alp_train: kernel_denom must be positive");
  }

  const Index n = points.rows();
  const Index m = targets.cols();
  const Matrix sq = pairwise_sq_dists(points, points);
  const double sigma0 =
      options.sigma0 ? *options.sigma0 : 2.0 * percentile_from_sq_dists(sq, 50.0);
  check_schedule(sigma0, options.mu, options.max_iter);
  const KernelMode mode = options.variant == LpVariant::standard
                              ? KernelMode::full
                              : options.kernel_mode;

  AlpModel model;
  model.train_points = points;
  model.sigma0 = sigma0;
  model.mu = options.mu;
  model.kernel_mode = mode;
  model.variant = options.variant;
  model.kernel_denom = options.kernel_denom;
  model.residuals.push_back(targets);  // level-0 signal is the raw target

  TrainReport report;
  std::vector<std::vector<double>> curves(static_cast<std::size_t>(m));
  std::vector<double> noise_floor(static_cast<std::size_t>(m));
  for (Index j = 0; j < m; ++j) {
    noise_floor[std::size_t(j)] =
        kConvergenceFloor * std::max(1.0, targets.col(j).squaredNorm() / double(n));
  }

  Matrix fitted = Matrix::Zero(n, m);
  Matrix kernel;         // level buffers, allocated once and recycled
  SmoothingOperator op;
  Matrix smoothed;
  double sigma = sigma0;
  for (int level = 0; level < options.max_iter; ++level) {
    gaussian_kernel(sq, sigma, options.kernel_denom, kernel);
    smoothing_operator(kernel, mode, sigma, op);
    if (op.degenerate_rows) {
      if (level == 0) {
        throw std::runtime_error(
            "alp_train: kernel underflow at the initial bandwidth; "
            "increase sigma0");
      }
      report.kernel_underflow = true;
      break;
    }
    apply_operator(op.values, model.residuals.back(), smoothed);
    fitted += smoothed;
    Matrix residual = targets - fitted;
    // The error curve is not monotone near sigma0 (broad levels can bump it
    // up before the useful scales are reached), so the level count is never
    // cut at the first non-improvement; the argmin of the whole curve picks
    // the stopping level afterwards. Only full convergence ends the loop
    // early: below the noise floor further levels cannot move the argmin.
    bool converged = true;
    for (Index j = 0; j < m; ++j) {
      auto& curve = curves[std::size_t(j)];
      const double err = residual.col(j).squaredNorm() / double(n);
      curve.push_back(err);
      if (err > noise_floor[std::size_t(j)]) converged = false;
    }
    model.residuals.push_back(std::move(residual));
    report.bandwidths.push_back(sigma);
    sigma /= options.mu;
    if (converged) break;
  }

  model.optimal_iter.resize(std::size_t(m));
  int deepest = 0;
  for (Index j = 0; j < m; ++j) {
    const int best = argmin_curve(curves[std::size_t(j)]);
    model.optimal_iter[std::size_t(j)] = best;
    deepest = std::max(deepest, best);
  }
  model.residuals.resize(std::size_t(deepest) + 1);

  report.error_curves = std::move(curves);
  report.optimal_iter = model.optimal_iter;
  report.iterations = int(report.bandwidths.size());
  return {std::move(model), std::move(report)};
}

Matrix alp_predict(const AlpModel& model, const Matrix& test_points) {
  if (model.residuals.empty() || model.optimal_iter.empty()) {
    throw std::invalid_argument("alp_predict: model has no trained levels");
  }
  if (test_points.cols() != model.train_points.cols()) {
    throw std::invalid_argument("alp_predict: test points have dimension " +
                                std::to_string(test_points.cols()) +
                                " but the model was trained on dimension " +
                                std::to_string(model.train_points.cols()));
  }
  const Index m = model.residuals[0].cols();
  if (Index(model.optimal_iter.size()) != m) {
    throw std::invalid_argument("alp_predict: model output bookkeeping is inconsistent");
  }
  for (int best : model.optimal_iter) {
    if (best < 0 || best >= int(model.residuals.size())) {
      throw std::invalid_argument("alp_predict: optimal level outside stored levels");
    }
  }

  const Matrix sq = pairwise_sq_dists(test_points, model.train_points);
  Matrix prediction = Matrix::Zero(test_points.rows(), m);
  Matrix kernel;
  SmoothingOperator op;
  Matrix level_values;
  double sigma = model.sigma0;
  for (std::size_t level = 0; level < model.residuals.size(); ++level) {
    // Out-of-sample evaluation always smooths with the full operator; the
    // zero-diagonal trick only matters on the training set.
    gaussian_kernel(sq, sigma, model.kernel_denom, kernel);
    smoothing_operator(kernel, KernelMode::full, sigma, op);
    apply_operator(op.values, model.residuals[level], level_values);
    for (Index j = 0; j < m; ++j) {
      if (model.optimal_iter[std::size_t(j)] >= int(level)) {
        prediction.col(j) += level_values.col(j);
      }
    }
    sigma /= model.mu;
  }
  return prediction;
}

std::vector<double> exact_loocv_curve(const Matrix& points, const Matrix& targets,
                                      double sigma0, double mu, int levels) {
  check_training_input(points, targets);
  check_schedule(sigma0, mu, levels);
  const Index n = points.rows();
  if (n > 2000) {
    throw std::invalid_argument(
        "exact_loocv_curve: capped at 2000 points (O(n^3) retraining); use "
        "the auto-adaptive training curve for larger samples");
  }
  const Index m = targets.cols();
  const Matrix sq = pairwise_sq_dists(points, points);

  // per_point(p, l) = squared held-out error at point p after level l.
  Matrix per_point(n, levels);
#pragma omp parallel for schedule(dynamic)
  for (Index p = 0; p < n; ++p) {
    Matrix sub_sq(n - 1, n - 1);
    Vector held_sq(n - 1);
    Matrix sub_targets(n - 1, m);
    for (Index i = 0, si = 0; i < n; ++i) {
      if (i == p) continue;
      held_sq(si) = sq(p, i);
      sub_targets.row(si) = targets.row(i);
      for (Index j = 0, sj = 0; j < n; ++j) {
        if (j == p) continue;
        sub_sq(si, sj) = sq(i, j);
        ++sj;
      }
      ++si;
    }

    Matrix residual = sub_targets;
    Matrix fitted = Matrix::Zero(n - 1, m);
    Eigen::RowVectorXd held_prediction = Eigen::RowVectorXd::Zero(m);
    double sigma = sigma0;
    for (int level = 0; level < levels; ++level) {
      const double inv = 1.0 / (sigma * sigma);
      Matrix op = (-sub_sq * inv).array().exp().matrix();
      const Vector row_sums = op.rowwise().sum();  // diagonal is 1, sums stay positive
      op.array().colwise() /= row_sums.array();
      Vector weights = (-held_sq * inv).array().exp().matrix();
      const double weight_sum = weights.sum();
      if (weight_sum < 1e-300) {
        weights.setConstant(1.0 / double(n - 1));
      } else {
        weights /= weight_sum;
      }
      held_prediction += weights.transpose() * residual;
      fitted += op * residual;
      residual = sub_targets - fitted;
      per_point(p, level) = (targets.row(p) - held_prediction).squaredNorm();
      sigma /= mu;
    }
  }

  std::vector<double> curve(static_cast<std::size_t>(levels));
  for (int level = 0; level < levels; ++level) {
    curve[std::size_t(level)] = per_point.col(level).sum() / double(n * m);
  }
  return curve;
}

std::vector<double> lp_train_error_curve(const Matrix& points, const Matrix& targets,
                                         double sigma0, double mu, int levels) {
  check_training_input(points, targets);
  check_schedule(sigma0, mu, levels);
  const Index n = points.rows();
  const Index m = targets.cols();
  const Matrix sq = pairwise_sq_dists(points, points);

  std::vector<double> curve(static_cast<std::size_t>(levels));
  Matrix residual = targets;
  Matrix fitted = Matrix::Zero(n, m);
  Matrix kernel;
  SmoothingOperator op;
  Matrix smoothed;
  double sigma = sigma0;
  for (int level = 0; level < levels; ++level) {
    gaussian_kernel(sq, sigma, 1.0, kernel);
    smoothing_operator(kernel, KernelMode::full, sigma, op);
    apply_operator(op.values, residual, smoothed);
    fitted += smoothed;
    residual = targets - fitted;
    curve[std::size_t(level)] = residual.squaredNorm() / double(n * m);
    sigma /= mu;
  }
  return curve;
}

}  // namespace alp
