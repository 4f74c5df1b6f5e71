#include "experiments.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "alp/diffusion.hpp"
#include "alp/eval.hpp"
#include "alp/io.hpp"
#include "alp/pyramid.hpp"
#include "alp/synthetic.hpp"

namespace alp::experiments {

namespace {

std::ofstream open_text(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error(path.string() + ": cannot open file for writing");
  }
  return out;
}

int argmin(const std::vector<double>& curve) {
  return int(std::min_element(curve.begin(), curve.end()) - curve.begin());
}

void write_error_curve(const std::filesystem::path& path,
                       const TrainReport& report) {
  Table curve;
  curve.columns = {"level", "sigma", "training_error"};
  curve.values.resize(Index(report.bandwidths.size()), 3);
  for (std::size_t l = 0; l < report.bandwidths.size(); ++l) {
    curve.values(Index(l), 0) = double(l);
    curve.values(Index(l), 1) = report.bandwidths[l];
    curve.values(Index(l), 2) = report.error_curves[0][l];
  }
  write_csv(path.string(), curve);
}

// The two regression experiments share everything but the noise amplitude.
void run_sine(const std::string& name, double noise,
              const std::filesystem::path& outdir, std::uint64_t seed) {
  const Index n = 4000;
  const Dataset data = composite_sine(n, noise, seed);
  const Split split = odd_even_split(data.points, data.targets);

  const AlpTrainResult trained = alp_train(split.train_points, split.train_targets);
  const Matrix prediction = alp_predict(trained.model, split.test_points);
  const RegressionMetrics metrics =
      regression_metrics(split.test_targets.col(0), prediction.col(0));

  write_error_curve(outdir / "error_curve.csv", trained.report);

  Table predictions;
  predictions.columns = {"x", "f", "prediction"};
  predictions.values.resize(split.test_points.rows(), 3);
  predictions.values.col(0) = split.test_points.col(0);
  predictions.values.col(1) = split.test_targets.col(0);
  predictions.values.col(2) = prediction.col(0);
  write_csv((outdir / "predictions.csv").string(), predictions);

  auto summary = open_text(outdir / "summary.txt");
  summary << "experiment: " << name << "\n"
          << "seed: " << seed << "\n"
          << "sample: " << n << " points, odd rows train / even rows test\n"
          << "noise amplitude: " << format_double(noise) << "\n"
          << "sigma0: " << format_double(trained.model.sigma0) << "\n"
          << "mu: " << format_double(trained.model.mu) << "\n"
          << "levels executed: " << trained.report.iterations << "\n"
          << "stopping level: " << trained.model.optimal_iter[0] << "\n"
          << "test rmse: " << format_double(metrics.rmse) << "\n"
          << "test mae: " << format_double(metrics.mae) << "\n";
}

void run_loocv_oracle(const std::filesystem::path& outdir, std::uint64_t seed) {
  const Index n = 100;
  const int levels = 12;
  const Dataset data = composite_sine(n, 0.1, seed);

  TrainOptions options;
  options.max_iter = levels;
  const AlpTrainResult trained = alp_train(data.points, data.targets, options);
  const std::vector<double> oracle = exact_loocv_curve(
      data.points, data.targets, trained.model.sigma0, trained.model.mu, levels);

  const auto& curve = trained.report.error_curves[0];
  const std::size_t shared = std::min(curve.size(), oracle.size());
  const std::vector<double> curve_shared(curve.begin(), curve.begin() + shared);
  const std::vector<double> oracle_shared(oracle.begin(), oracle.begin() + shared);
  const int curve_best = argmin(curve_shared);
  const int oracle_best = argmin(oracle_shared);
  const double gap =
      std::abs(curve[std::size_t(oracle_best)] - oracle[std::size_t(oracle_best)]) /
      oracle[std::size_t(oracle_best)];

  Table curves;
  curves.columns = {"level", "sigma", "training_error", "exact_loocv"};
  curves.values.resize(Index(shared), 4);
  for (std::size_t l = 0; l < shared; ++l) {
    curves.values(Index(l), 0) = double(l);
    curves.values(Index(l), 1) = trained.report.bandwidths[l];
    curves.values(Index(l), 2) = curve[l];
    curves.values(Index(l), 3) = oracle[l];
  }
  write_csv((outdir / "curves.csv").string(), curves);

  auto summary = open_text(outdir / "summary.txt");
  summary << "experiment: loocv-oracle\n"
          << "seed: " << seed << "\n"
          << "sample: " << n << " points, noise 0.1\n"
          << "sigma0: " << format_double(trained.model.sigma0) << "\n"
          << "levels compared: " << shared << "\n"
          << "training-curve argmin: " << curve_best << "\n"
          << "exact-loocv argmin: " << oracle_best << "\n"
          << "argmin match: " << (curve_best == oracle_best ? "yes" : "no") << "\n"
          << "relative gap at the loocv minimum: " << format_double(gap) << "\n";
}

void run_dm_cluster_agreement(const std::filesystem::path& outdir,
                              std::uint64_t seed) {
  const Index n = 600;
  const Index n_train = 420;
  const SwissRoll roll = swiss_roll(n, 0.25, seed);

  // Reference: embed and cluster the full sample.
  DmConfig config;
  config.sigma = default_dm_sigma(roll.points);
  const DiffusionEmbedding full = dm_fit(roll.points, config);
  const ClusteringResult full_clusters = kmeans(full.coordinates, 3, seed);

  // Pipeline under test: embed the first 420 points, extend the remaining
  // 180 out of sample, cluster the combined coordinates.
  const Matrix train_points = roll.points.topRows(n_train);
  const Matrix test_points = roll.points.bottomRows(n - n_train);
  DmConfig split_config;
  split_config.sigma = default_dm_sigma(train_points);
  const DiffusionEmbedding part = dm_fit(train_points, split_config);
  const Matrix extended = dm_extend(part, test_points);

  Matrix combined(n, part.coordinates.cols());
  combined.topRows(n_train) = part.coordinates;
  combined.bottomRows(n - n_train) = extended;
  const ClusteringResult split_clusters = kmeans(combined, 3, seed);

  const ClusterAgreement agreement =
      cluster_agreement(full_clusters.labels, split_clusters.labels, 3);

  Table coords;
  coords.columns = {"t"};
  for (int k = 1; k <= full.dim; ++k) {
    coords.columns.push_back("dm_" + std::to_string(k));
  }
  coords.columns.push_back("label_full");
  coords.columns.push_back("label_split");
  coords.values.resize(n, Index(coords.columns.size()));
  coords.values.col(0) = roll.parameter;
  coords.values.block(0, 1, n, full.dim) = full.coordinates;
  for (Index i = 0; i < n; ++i) {
    coords.values(i, full.dim + 1) = full_clusters.labels[std::size_t(i)];
    coords.values(i, full.dim + 2) = split_clusters.labels[std::size_t(i)];
  }
  write_csv((outdir / "embedding.csv").string(), coords);

  auto summary = open_text(outdir / "summary.txt");
  summary << "experiment: dm-cluster-agreement\n"
          << "seed: " << seed << "\n"
          << "sample: swiss roll, " << n << " points, noise 0.25, " << n_train
          << " train / " << (n - n_train) << " extended\n"
          << "full-sample sigma: " << format_double(config.sigma) << "\n"
          << "full-sample embedding dimension: " << full.dim << "\n"
          << "split embedding dimension: " << part.dim << "\n"
          << "label agreement: " << format_double(agreement.accuracy) << "\n"
          << "confusion (rows reference, columns matched):\n";
  for (Index i = 0; i < 3; ++i) {
    summary << "  " << agreement.counts(i, 0) << " " << agreement.counts(i, 1)
            << " " << agreement.counts(i, 2) << "\n";
  }
}

}  // namespace

const std::vector<std::string>& names() {
  static const std::vector<std::string> list = {
      "sine-small-noise",
      "sine-large-noise",
      "loocv-oracle",
      "dm-cluster-agreement",
  };
  return list;
}

void run(const std::string& name, const std::string& outdir, std::uint64_t seed) {
  const auto& known = names();
  if (std::find(known.begin(), known.end(), name) == known.end()) {
    std::string message = "unknown experiment '" + name + "'; available:";
    for (const auto& n : known) message += " " + n;
    throw std::invalid_argument(message);
  }
  const std::filesystem::path dir(outdir);
  std::filesystem::create_directories(dir);

  if (name == "sine-small-noise") {
    run_sine(name, 0.05, dir, seed);
  } else if (name == "sine-large-noise") {
    run_sine(name, 0.25, dir, seed);
  } else if (name == "loocv-oracle") {
    run_loocv_oracle(dir, seed);
  } else {
    run_dm_cluster_agreement(dir, seed);
  }
}

}  // namespace alp::experiments
