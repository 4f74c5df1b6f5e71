#pragma once

#include <cstdint>
#include <vector>

#include "alp/types.hpp"

namespace alp {

struct ClusteringResult {
  std::vector<int> labels;
  Matrix centroids;  // k x dim
  double inertia = 0.0;
  // Total within-cluster squared distance after each assignment pass;
  // non-increasing by construction.
  std::vector<double> inertia_history;
  int iterations = 0;
};

// Lloyd's algorithm with k-means++ seeding. Deterministic for a fixed seed;
// ties in assignment go to the lowest centroid index, emptied clusters are
// reseeded with the point farthest from its centroid.
ClusteringResult kmeans(const Matrix& points, int k, std::uint64_t seed = 0,
                        int max_iter = 100);

using CountMatrix =
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct ClusterAgreement {
  // Confusion counts with predicted labels permuted by `permutation`, so the
  // best matching sits on the diagonal.
  CountMatrix counts;
  // permutation[i] = original predicted label matched to reference label i.
  std::vector<int> permutation;
  double accuracy = 0.0;
};

// Matches predicted cluster labels to reference labels by the permutation
// maximizing the diagonal (exhaustive, hence k <= 8) and reports the
// resulting confusion matrix and accuracy.
ClusterAgreement cluster_agreement(const std::vector<int>& reference,
                                   const std::vector<int>& predicted, int k);

struct RegressionMetrics {
  double rmse = 0.0;
  double mae = 0.0;
};

RegressionMetrics regression_metrics(const Vector& truth, const Vector& prediction);

}  // namespace alp
