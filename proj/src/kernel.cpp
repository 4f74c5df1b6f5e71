#include "alp/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace alp {

namespace {

// Below this a row sum is treated as zero; well inside denormal range so a
// single surviving weight keeps the row alive.
constexpr double kRowSumFloor = 1e-300;

void check_same_dim(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw std::invalid_argument("pairwise_sq_dists: point dimensions differ (" +
                                std::to_string(a.cols()) + " vs " +
                                std::to_string(b.cols()) + ")");
  }
}

double row_sq_dist(const double* x, const double* y, Index dim) {
  double acc = 0.0;
  for (Index k = 0; k < dim; ++k) {
    const double diff = x[k] - y[k];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

const char* to_string(KernelMode mode) {
  switch (mode) {
    case KernelMode::full: return "full";
    case KernelMode::zero_diag_then_normalize: return "zero-diag-normalize";
    case KernelMode::normalize_then_zero_diag: return "normalize-zero-diag";
  }
  throw std::invalid_argument("to_string: unknown kernel mode");
}

KernelMode kernel_mode_from_string(std::string_view name) {
  if (name == "full") return KernelMode::full;
  if (name == "zero-diag-normalize") return KernelMode::zero_diag_then_normalize;
  if (name == "normalize-zero-diag") return KernelMode::normalize_then_zero_diag;
  throw std::invalid_argument("unknown kernel mode '" + std::string(name) +
                              "'; expected full, zero-diag-normalize or "
                              "normalize-zero-diag");
}

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  check_same_dim(a, b);
  const Index n = a.rows(), r = b.rows(), dim = a.cols();
  Matrix out(n, r);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* ai = a.data() + i * dim;
    double* oi = out.data() + i * r;
    for (Index j = 0; j < r; ++j) {
      oi[j] = row_sq_dist(ai, b.data() + j * dim, dim);
    }
  }
  return out;
}

void gaussian_kernel(const Matrix& sq_dists, double sigma, double denom,
                     Matrix& out) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  }
  if (!(denom > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: denom must be positive");
  }
  const double inv = 1.0 / (denom * sigma * sigma);
  const Index n = sq_dists.rows(), r = sq_dists.cols();
  out.resize(n, r);
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* di = sq_dists.data() + i * r;
    double* oi = out.data() + i * r;
    for (Index j = 0; j < r; ++j) {
      oi[j] = std::exp(-di[j] * inv);
    }
  }
}

Matrix gaussian_kernel(const Matrix& sq_dists, double sigma, double denom) {
  Matrix out;
  gaussian_kernel(sq_dists, sigma, denom, out);
  return out;
}

void smoothing_operator(const Matrix& kernel, KernelMode mode, double scale,
                        SmoothingOperator& op) {
  const Index n = kernel.rows(), r = kernel.cols();
  if (mode != KernelMode::full && n != r) {
    throw std::invalid_argument(
        "smoothing_operator: zero-diagonal modes need a square kernel");
  }

  op.values.resize(n, r);
  op.scale = scale;
  op.mode = mode;

  bool degenerate = false;
  bool negative = false;
#pragma omp parallel for schedule(static) reduction(|| : degenerate, negative)
  for (Index i = 0; i < n; ++i) {
    const double* ki = kernel.data() + i * r;
    double* oi = op.values.data() + i * r;
    const bool drop_diag = mode != KernelMode::full;
    // A row is degenerate when the weight mass over its permitted columns
    // (everything but the dropped diagonal) has underflowed.
    double permitted = 0.0;
    for (Index j = 0; j < r; ++j) {
      if (ki[j] < 0.0) negative = true;
      if (drop_diag && j == i) continue;
      permitted += ki[j];
    }
    if (permitted < kRowSumFloor) degenerate = true;
    // normalize_then_zero_diag keeps the diagonal in the denominator, so its
    // degenerate rows come out (numerically) zero instead of uniform.
    const double sum = mode == KernelMode::normalize_then_zero_diag
                           ? permitted + ki[i]
                           : permitted;
    if (sum < kRowSumFloor) {
      const double u = drop_diag ? 1.0 / double(r - 1) : 1.0 / double(r);
      for (Index j = 0; j < r; ++j) oi[j] = (drop_diag && j == i) ? 0.0 : u;
    } else {
      for (Index j = 0; j < r; ++j) {
        oi[j] = (drop_diag && j == i) ? 0.0 : ki[j] / sum;
      }
    }
  }
  if (negative) {
    throw std::invalid_argument("smoothing_operator: kernel has negative entries");
  }
  op.degenerate_rows = degenerate;
}

SmoothingOperator smoothing_operator(const Matrix& kernel, KernelMode mode,
                                     double scale) {
  SmoothingOperator op;
  smoothing_operator(kernel, mode, scale, op);
  return op;
}

void apply_operator(const Matrix& op, const Matrix& values, Matrix& out) {
  if (op.cols() != values.rows()) {
    throw std::invalid_argument("apply_operator: operator has " +
                                std::to_string(op.cols()) +
                                " columns but values has " +
                                std::to_string(values.rows()) + " rows");
  }
  const Index n = op.rows(), r = op.cols(), m = values.cols();
  out.resize(n, m);
  // Rows are independent and each row accumulates in a fixed order, so the
  // result is identical for any thread count.
#pragma omp parallel for schedule(static)
  for (Index i = 0; i < n; ++i) {
    const double* oi = op.data() + i * r;
    double* yi = out.data() + i * m;
    for (Index j = 0; j < m; ++j) yi[j] = 0.0;
    for (Index k = 0; k < r; ++k) {
      const double w = oi[k];
      const double* vk = values.data() + k * m;
      for (Index j = 0; j < m; ++j) yi[j] += w * vk[j];
    }
  }
}

Matrix apply_operator(const Matrix& op, const Matrix& values) {
  Matrix out;
  apply_operator(op, values, out);
  return out;
}

double pairwise_distance_percentile(const Matrix& points, double percentile) {
  const Index n = points.rows();
  if (n < 2) {
    throw std::invalid_argument(
        "pairwise_distance_percentile: need at least two points");
  }
  if (!(percentile >= 0.0) || !(percentile <= 100.0)) {
    throw std::invalid_argument(
        "pairwise_distance_percentile: percentile must lie in [0, 100]");
  }
  const Index dim = points.cols();
  std::vector<double> dists;
  dists.reserve(std::size_t(n) * std::size_t(n - 1) / 2);
  for (Index i = 0; i < n; ++i) {
    const double* xi = points.data() + i * dim;
    for (Index j = i + 1; j < n; ++j) {
      dists.push_back(std::sqrt(row_sq_dist(xi, points.data() + j * dim, dim)));
    }
  }
  auto rank = static_cast<std::ptrdiff_t>(
      std::llround(percentile / 100.0 * double(dists.size() - 1)));
  rank = std::clamp<std::ptrdiff_t>(rank, 0, std::ptrdiff_t(dists.size()) - 1);
  std::nth_element(dists.begin(), dists.begin() + rank, dists.end());
  return dists[std::size_t(rank)];
}

double median_pairwise_distance(const Matrix& points) {
  return pairwise_distance_percentile(points, 50.0);
}

namespace serial {

Matrix pairwise_sq_dists(const Matrix& a, const Matrix& b) {
  check_same_dim(a, b);
  const Index n = a.rows(), r = b.rows(), dim = a.cols();
  Matrix out(n, r);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < r; ++j) {
      out(i, j) = row_sq_dist(a.data() + i * dim, b.data() + j * dim, dim);
    }
  }
  return out;
}

Matrix gaussian_kernel(const Matrix& sq_dists, double sigma, double denom) {
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: sigma must be positive");
  }
  if (!(denom > 0.0)) {
    throw std::invalid_argument("gaussian_kernel: denom must be positive");
  }
  const double inv = 1.0 / (denom * sigma * sigma);
  Matrix out(sq_dists.rows(), sq_dists.cols());
  for (Index i = 0; i < sq_dists.rows(); ++i) {
    for (Index j = 0; j < sq_dists.cols(); ++j) {
      out(i, j) = std::exp(-sq_dists(i, j) * inv);
    }
  }
  return out;
}

Matrix apply_operator(const Matrix& op, const Matrix& values) {
  if (op.cols() != values.rows()) {
    throw std::invalid_argument("apply_operator: shape mismatch");
  }
  const Index n = op.rows(), r = op.cols(), m = values.cols();
  Matrix out = Matrix::Zero(n, m);
  for (Index i = 0; i < n; ++i) {
    for (Index k = 0; k < r; ++k) {
      const double w = op(i, k);
      for (Index j = 0; j < m; ++j) out(i, j) += w * values(k, j);
    }
  }
  return out;
}

}  // namespace serial

}  // namespace alp
