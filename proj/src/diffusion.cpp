#include "alp/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace alp {

namespace {

void check_config(const DmConfig& config) {
  if (!(config.sigma > 0.0)) {
    throw std::invalid_argument("dm_fit: sigma must be positive");
  }
  if (!(config.alpha >= 0.0) || !(config.alpha <= 1.0)) {
    throw std::invalid_argument("dm_fit: alpha must lie in [0, 1]");
  }
  if (config.t < 1) {
    throw std::invalid_argument("dm_fit: diffusion time t must be >= 1");
  }
  if (!(config.delta > 0.0) || !(config.delta < 1.0)) {
    throw std::invalid_argument("dm_fit: delta must lie in (0, 1)");
  }
  if (!(config.kernel_denom > 0.0)) {
    throw std::invalid_argument("dm_fit: kernel_denom must be positive");
  }
}

}  // namespace

double default_dm_sigma(const Matrix& points) {
  return pairwise_distance_percentile(points, 50.0);
}

Matrix dm_affinity(const Matrix& points, double sigma, double kernel_denom) {
  return gaussian_kernel(pairwise_sq_dists(points, points), sigma, kernel_denom);
}

DmGraph dm_graph(const Matrix& affinity, double alpha) {
  if (affinity.rows() != affinity.cols()) {
    throw std::invalid_argument("dm_graph: affinity matrix must be square");
  }
  if (!(alpha >= 0.0) || !(alpha <= 1.0)) {
    throw std::invalid_argument("dm_graph: alpha must lie in [0, 1]");
  }
  DmGraph graph;
  graph.degrees = affinity.rowwise().sum();
  if ((graph.degrees.array() <= 0.0).any()) {
    throw std::invalid_argument("dm_graph: a vertex has zero degree");
  }
  if (alpha == 0.0) {
    graph.alpha_affinity = affinity;
  } else {
    const Vector scale = graph.degrees.array().pow(alpha).matrix();
    // w_ij / (g_i^a g_j^a); products commute, so symmetry is preserved
    // exactly.
    const Matrix outer = scale * scale.transpose();
    graph.alpha_affinity = (affinity.array() / outer.array()).matrix();
  }
  graph.alpha_degrees = graph.alpha_affinity.rowwise().sum();
  return graph;
}

Matrix dm_markov_matrix(const DmGraph& graph) {
  Matrix walk = graph.alpha_affinity;
  walk.array().colwise() /= graph.alpha_degrees.array();
  return walk;
}

DiffusionEmbedding dm_fit(const Matrix& points, const DmConfig& config) {
  check_config(config);
  const Index n = points.rows();
  if (n < 3) {
    throw std::invalid_argument("dm_fit: need at least 3 points");
  }
  if (!points.allFinite()) {
    throw std::invalid_argument("dm_fit: points contain non-finite values");
  }
  const Matrix sq = pairwise_sq_dists(points, points);
  if (!(sq.maxCoeff() > 0.0)) {
    throw std::invalid_argument("dm_fit: all points coincide");
  }

  const Matrix affinity = gaussian_kernel(sq, config.sigma, config.kernel_denom);
  DmGraph graph = dm_graph(affinity, config.alpha);

  // The walk D^-1 W is conjugate to the symmetric S = D^-1/2 W D^-1/2, which
  // has the same eigenvalues and orthonormal eigenvectors u_k; the walk's
  // right eigenvectors are D^-1/2 u_k.
  const Vector half = graph.alpha_degrees.array().sqrt().matrix();
  const Matrix outer = half * half.transpose();
  const Matrix symmetric = (graph.alpha_affinity.array() / outer.array()).matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetric);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("dm_fit: eigendecomposition failed");
  }

  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index(0));
  const Vector& raw = solver.eigenvalues();
  std::sort(order.begin(), order.end(), [&raw](Index a, Index b) {
    const double ma = std::abs(raw(a)), mb = std::abs(raw(b));
    if (ma != mb) return ma > mb;
    if (raw(a) != raw(b)) return raw(a) > raw(b);
    return a < b;
  });

  DiffusionEmbedding emb;
  emb.all_eigenvalues.resize(n);
  emb.all_eigenvectors.resize(n, n);
  // Scaled so that sum_i phi0_i psi_k(i)^2 = 1 with phi0 the stationary
  // distribution g^a / sum(g^a); this makes psi_0 identically 1 and the
  // coordinate geometry reproduce diffusion distances exactly.
  const double z = std::sqrt(graph.alpha_degrees.sum());
  for (Index k = 0; k < n; ++k) {
    const Index s = order[std::size_t(k)];
    emb.all_eigenvalues(k) = raw(s);
    Vector psi = (z * solver.eigenvectors().col(s).array() / half.array()).matrix();
    Index peak = 0;
    for (Index i = 1; i < n; ++i) {
      if (std::abs(psi(i)) > std::abs(psi(peak))) peak = i;
    }
    if (psi(peak) < 0.0) psi = -psi;
    emb.all_eigenvectors.col(k) = psi;
  }

  if (std::abs(emb.all_eigenvalues(0) - 1.0) > 1e-8) {
    throw std::runtime_error(
        "dm_fit: leading eigenvalue is not 1; eigendecomposition failed");
  }
  const double lead = std::abs(emb.all_eigenvalues(1));
  if (!(lead > 0.0)) {
    throw std::runtime_error("dm_fit: spectrum collapses after the constant mode");
  }

  // dim = largest k >= 1 with |lambda_k| > delta * |lambda_1|; magnitudes are
  // sorted, so this is a prefix scan.
  int dim = 1;
  while (dim + 1 < n &&
         std::abs(emb.all_eigenvalues(dim + 1)) > config.delta * lead) {
    ++dim;
  }

  emb.dim = dim;
  emb.eigenvalues = emb.all_eigenvalues.head(dim + 1);
  emb.eigenvectors = emb.all_eigenvectors.leftCols(dim + 1);
  emb.coordinates.resize(n, dim);
  for (int k = 1; k <= dim; ++k) {
    emb.coordinates.col(k - 1) =
        std::pow(emb.eigenvalues(k), double(config.t)) * emb.eigenvectors.col(k);
  }
  emb.degrees = std::move(graph.degrees);
  emb.alpha_degrees = std::move(graph.alpha_degrees);
  emb.config = config;
  emb.train_points = points;
  return emb;
}

double diffusion_distance(const DiffusionEmbedding& embedding, Index i, Index j,
                          bool use_full_spectrum) {
  const Index n = embedding.all_eigenvectors.rows();
  if (i < 0 || i >= n || j < 0 || j >= n) {
    throw std::out_of_range("diffusion_distance: point index out of range");
  }
  const Index top = use_full_spectrum ? n - 1 : Index(embedding.dim);
  const double t = double(embedding.config.t);
  double acc = 0.0;
  // k = 0 contributes nothing: the constant eigenvector cancels.
  for (Index k = 1; k <= top; ++k) {
    const double diff =
        embedding.all_eigenvectors(i, k) - embedding.all_eigenvectors(j, k);
    acc += std::pow(embedding.all_eigenvalues(k), 2.0 * t) * diff * diff;
  }
  return acc;
}

Matrix dm_extend(const DiffusionEmbedding& embedding, const Matrix& test_points,
                 const TrainOptions& options) {
  if (embedding.dim < 1 ||
      embedding.eigenvectors.cols() != Index(embedding.dim) + 1) {
    throw std::invalid_argument("dm_extend: embedding is not fitted");
  }
  if (test_points.cols() != embedding.train_points.cols()) {
    throw std::invalid_argument("dm_extend: test points have dimension " +
                                std::to_string(test_points.cols()) +
                                " but the embedding was built on dimension " +
                                std::to_string(embedding.train_points.cols()));
  }
  const Matrix targets = embedding.eigenvectors.rightCols(embedding.dim);
  const AlpTrainResult trained =
      alp_train(embedding.train_points, targets, options);
  Matrix extended = alp_predict(trained.model, test_points);
  for (int k = 1; k <= embedding.dim; ++k) {
    extended.col(k - 1) *=
        std::pow(embedding.eigenvalues(k), double(embedding.config.t));
  }
  return extended;
}

}  // namespace alp
