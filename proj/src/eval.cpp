#include "alp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace alp {

namespace {

double sq_dist(const Matrix& a, Index i, const Matrix& b, Index j) {
  return (a.row(i) - b.row(j)).squaredNorm();
}

}  // namespace

ClusteringResult kmeans(const Matrix& points, int k, std::uint64_t seed,
                        int max_iter) {
  const Index n = points.rows();
  if (k < 1) throw std::invalid_argument("kmeans: k must be at least 1");
  if (Index(k) > n) {
    throw std::invalid_argument("kmeans: k exceeds the number of points");
  }
  if (max_iter < 1) throw std::invalid_argument("kmeans: max_iter must be >= 1");
  if (!points.allFinite()) {
    throw std::invalid_argument("kmeans: points contain non-finite values");
  }
  const Index dim = points.cols();

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  // k-means++ seeding: each next centroid is drawn with probability
  // proportional to the squared distance to the nearest one chosen so far.
  Matrix centroids(k, dim);
  std::vector<bool> chosen(std::size_t(n), false);
  Index first = std::min<Index>(n - 1, Index(unit(rng) * double(n)));
  centroids.row(0) = points.row(first);
  chosen[std::size_t(first)] = true;
  Vector nearest_sq(n);
  for (Index i = 0; i < n; ++i) nearest_sq(i) = sq_dist(points, i, centroids, 0);
  for (int c = 1; c < k; ++c) {
    const double total = nearest_sq.sum();
    Index pick = -1;
    if (total > 0.0) {
      const double r = unit(rng) * total;
      double acc = 0.0;
      for (Index i = 0; i < n; ++i) {
        acc += nearest_sq(i);
        if (acc >= r) { pick = i; break; }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // Remaining mass is zero (duplicate points); fall back to the first
      // point not yet used as a centroid.
      for (Index i = 0; i < n; ++i) {
        if (!chosen[std::size_t(i)]) { pick = i; break; }
      }
      if (pick < 0) pick = 0;
    }
    centroids.row(c) = points.row(pick);
    chosen[std::size_t(pick)] = true;
    for (Index i = 0; i < n; ++i) {
      nearest_sq(i) = std::min(nearest_sq(i), sq_dist(points, i, centroids, c));
    }
  }

  ClusteringResult result;
  result.labels.assign(std::size_t(n), -1);
  Vector own_sq(n);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    double inertia = 0.0;
    for (Index i = 0; i < n; ++i) {
      int best = 0;
      double best_sq = sq_dist(points, i, centroids, 0);
      for (int c = 1; c < k; ++c) {
        const double d = sq_dist(points, i, centroids, c);
        if (d < best_sq) { best_sq = d; best = c; }
      }
      if (result.labels[std::size_t(i)] != best) {
        result.labels[std::size_t(i)] = best;
        changed = true;
      }
      own_sq(i) = best_sq;
      inertia += best_sq;
    }
    result.inertia_history.push_back(inertia);
    result.inertia = inertia;
    result.iterations = iter + 1;
    if (!changed) break;

    Matrix sums = Matrix::Zero(k, dim);
    std::vector<Index> sizes(std::size_t(k), 0);
    for (Index i = 0; i < n; ++i) {
      sums.row(result.labels[std::size_t(i)]) += points.row(i);
      ++sizes[std::size_t(result.labels[std::size_t(i)])];
    }
    for (int c = 0; c < k; ++c) {
      if (sizes[std::size_t(c)] > 0) {
        centroids.row(c) = sums.row(c) / double(sizes[std::size_t(c)]);
      } else {
        // Reseed an emptied cluster with the point farthest from its own
        // centroid; strictly lowers the objective.
        Index far = 0;
        for (Index i = 1; i < n; ++i) {
          if (own_sq(i) > own_sq(far)) far = i;
        }
        centroids.row(c) = points.row(far);
        own_sq(far) = 0.0;
      }
    }
  }
  result.centroids = std::move(centroids);
  return result;
}

ClusterAgreement cluster_agreement(const std::vector<int>& reference,
                                   const std::vector<int>& predicted, int k) {
  if (reference.size() != predicted.size()) {
    throw std::invalid_argument("cluster_agreement: label vectors differ in length");
  }
  if (reference.empty()) {
    throw std::invalid_argument("cluster_agreement: no labels");
  }
  if (k < 1 || k > 8) {
    throw std::invalid_argument(
        "cluster_agreement: k must lie in [1, 8] (matching is exhaustive)");
  }
  CountMatrix counts = CountMatrix::Zero(k, k);
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const int r = reference[i], p = predicted[i];
    if (r < 0 || r >= k || p < 0 || p >= k) {
      throw std::invalid_argument("cluster_agreement: label outside [0, k)");
    }
    ++counts(r, p);
  }

  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best_perm = perm;
  std::int64_t best_diag = -1;
  do {
    std::int64_t diag = 0;
    for (int i = 0; i < k; ++i) diag += counts(i, perm[std::size_t(i)]);
    if (diag > best_diag) {
      best_diag = diag;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ClusterAgreement agreement;
  agreement.counts.resize(k, k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) {
      agreement.counts(i, j) = counts(i, best_perm[std::size_t(j)]);
    }
  }
  agreement.permutation = std::move(best_perm);
  agreement.accuracy = double(best_diag) / double(reference.size());
  return agreement;
}

RegressionMetrics regression_metrics(const Vector& truth, const Vector& prediction) {
  if (truth.size() != prediction.size()) {
    throw std::invalid_argument("regression_metrics: size mismatch");
  }
  if (truth.size() == 0) {
    throw std::invalid_argument("regression_metrics: empty input");
  }
  if (!truth.allFinite() || !prediction.allFinite()) {
    throw std::invalid_argument("regression_metrics: non-finite values");
  }
  const Vector diff = truth - prediction;
  RegressionMetrics metrics;
  metrics.rmse = std::sqrt(diff.squaredNorm() / double(diff.size()));
  metrics.mae = diff.cwiseAbs().mean();
  return metrics;
}

}  // namespace alp
