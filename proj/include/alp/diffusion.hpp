#pragma once

#include "alp/pyramid.hpp"

namespace alp {

struct DmConfig {
  // Kernel bandwidth; default_dm_sigma gives the median-distance rule.
  double sigma = 0.0;
  // Density normalization exponent in [0, 1]; 1 removes sampling-density
  // effects, 0 keeps the plain random-walk normalization.
  double alpha = 1.0;
  // Diffusion time, >= 1.
  int t = 1;
  // Relative spectral cutoff in (0, 1): coordinates keep every eigenvalue
  // with |lambda_k| > delta * |lambda_1|.
  double delta = 0.1;
  // Kernel is exp(-d^2 / (kernel_denom * sigma^2)); the diffusion convention
  // uses 2.
  double kernel_denom = 2.0;
};

// Pieces of the normalized affinity graph, exposed so tests and diagnostics
// can check them directly.
struct DmGraph {
  Matrix alpha_affinity;  // w_ij / (g_i^alpha * g_j^alpha)
  Vector degrees;         // row sums of the raw affinity
  Vector alpha_degrees;   // row sums of alpha_affinity
};

struct DiffusionEmbedding {
  // Retained spectrum, |lambda| descending; eigenvalues(0) = 1 and
  // eigenvectors.col(0) is the constant vector.
  Vector eigenvalues;   // length dim + 1
  Matrix eigenvectors;  // n x (dim + 1)
  int dim = 0;
  // coordinates.col(k-1) = lambda_k^t * eigenvectors.col(k), k = 1..dim.
  Matrix coordinates;

  Vector degrees;
  Vector alpha_degrees;
  // Full spectrum, kept so diffusion distances can be evaluated without
  // truncation error.
  Vector all_eigenvalues;
  Matrix all_eigenvectors;

  DmConfig config;
  Matrix train_points;
};

double default_dm_sigma(const Matrix& points);

Matrix dm_affinity(const Matrix& points, double sigma, double kernel_denom = 2.0);
DmGraph dm_graph(const Matrix& affinity, double alpha);
// Row-stochastic transition matrix of the density-normalized walk.
Matrix dm_markov_matrix(const DmGraph& graph);

// Embeds the sample: eigendecomposition of the normalized walk via its
// symmetric conjugate, eigenvectors scaled against the stationary
// distribution so that the constant eigenvector is exactly 1 and squared
// Euclidean distance in the (untruncated) coordinates equals the diffusion
// distance. Throws std::invalid_argument on malformed input or when every
// point coincides, std::runtime_error when the eigensolver fails.
DiffusionEmbedding dm_fit(const Matrix& points, const DmConfig& config);

// Squared diffusion distance at time config.t between training points i and
// j; uses the retained spectrum unless use_full_spectrum is set.
double diffusion_distance(const DiffusionEmbedding& embedding, Index i, Index j,
                          bool use_full_spectrum = false);

// Out-of-sample extension: trains an auto-adaptive pyramid per retained
// eigenvector on the training points and evaluates it at test_points,
// scaling eigenvector k by lambda_k^t. Returns one row of diffusion
// coordinates per test point.
Matrix dm_extend(const DiffusionEmbedding& embedding, const Matrix& test_points,
                 const TrainOptions& options = {});

}  // namespace alp
