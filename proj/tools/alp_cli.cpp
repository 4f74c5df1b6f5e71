#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "alp/diffusion.hpp"
#include "alp/eval.hpp"
#include "alp/io.hpp"
#include "alp/pyramid.hpp"
#include "alp/synthetic.hpp"
#include "experiments.hpp"

namespace {

using alp::Index;
using alp::Matrix;
using alp::Table;

Index column_index(const Table& table, const std::string& name) {
  const auto it = std::find(table.columns.begin(), table.columns.end(), name);
  if (it == table.columns.end()) {
    std::string message = "column '" + name + "' not found; available:";
    for (const auto& c : table.columns) message += " " + c;
    throw std::invalid_argument(message);
  }
  return Index(it - table.columns.begin());
}

// Splits a table into feature columns and the named target columns.
struct TargetSplit {
  Matrix features;
  Matrix targets;
  std::vector<std::string> feature_names;
  std::vector<std::string> target_names;
};

TargetSplit split_targets(const Table& table, const std::vector<std::string>& targets) {
  std::vector<Index> target_cols;
  for (const auto& name : targets) target_cols.push_back(column_index(table, name));

  TargetSplit split;
  std::vector<Index> feature_cols;
  for (Index c = 0; c < table.values.cols(); ++c) {
    if (std::find(target_cols.begin(), target_cols.end(), c) == target_cols.end()) {
      feature_cols.push_back(c);
      split.feature_names.push_back(table.columns[std::size_t(c)]);
    }
  }
  if (feature_cols.empty()) {
    throw std::invalid_argument("every column is a target; no features left");
  }
  split.target_names = targets;
  split.features.resize(table.values.rows(), Index(feature_cols.size()));
  for (std::size_t c = 0; c < feature_cols.size(); ++c) {
    split.features.col(Index(c)) = table.values.col(feature_cols[c]);
  }
  split.targets.resize(table.values.rows(), Index(target_cols.size()));
  for (std::size_t c = 0; c < target_cols.size(); ++c) {
    split.targets.col(Index(c)) = table.values.col(target_cols[c]);
  }
  return split;
}

Matrix drop_columns(const Table& table, const std::vector<std::string>& drop,
                    std::vector<Index>& dropped_cols) {
  std::vector<Index> drop_idx;
  for (const auto& name : drop) drop_idx.push_back(column_index(table, name));
  dropped_cols = drop_idx;

  std::vector<Index> keep;
  for (Index c = 0; c < table.values.cols(); ++c) {
    if (std::find(drop_idx.begin(), drop_idx.end(), c) == drop_idx.end()) {
      keep.push_back(c);
    }
  }
  if (keep.empty()) {
    throw std::invalid_argument("every column was dropped; no features left");
  }
  Matrix features(table.values.rows(), Index(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    features.col(Index(c)) = table.values.col(keep[c]);
  }
  return features;
}

void print_train_report(const alp::AlpTrainResult& result,
                        const std::vector<std::string>& target_names) {
  const auto& report = result.report;
  std::cout << "sigma0: " << alp::format_double(result.model.sigma0) << "\n";
  std::cout << "levels executed: " << report.iterations << "\n";
  if (report.kernel_underflow) {
    std::cout << "note: stopped early, kernel underflowed at the next level\n";
  }
  std::cout << "level  sigma";
  for (const auto& name : target_names) std::cout << "  error[" << name << "]";
  std::cout << "\n";
  for (int l = 0; l < report.iterations; ++l) {
    std::cout << l << "  " << alp::format_double(report.bandwidths[std::size_t(l)]);
    for (std::size_t m = 0; m < target_names.size(); ++m) {
      std::cout << "  " << alp::format_double(report.error_curves[m][std::size_t(l)]);
    }
    std::cout << "\n";
  }
  for (std::size_t m = 0; m < target_names.size(); ++m) {
    std::cout << "stopping level[" << target_names[m]
              << "]: " << report.optimal_iter[m] << "\n";
  }
}

int cmd_synth(const std::string& kind, Index n, double noise, std::uint64_t seed,
              const std::string& out) {
  Table table;
  if (kind == "sine") {
    const alp::Dataset data = alp::composite_sine(n, noise, seed);
    table.columns = {"x", "f"};
    table.values.resize(n, 2);
    table.values.col(0) = data.points.col(0);
    table.values.col(1) = data.targets.col(0);
  } else if (kind == "swiss-roll") {
    const alp::SwissRoll roll = alp::swiss_roll(n, noise, seed);
    table.columns = {"x", "y", "z", "t"};
    table.values.resize(n, 4);
    table.values.leftCols(3) = roll.points;
    table.values.col(3) = roll.parameter;
  } else {
    throw std::invalid_argument("unknown dataset '" + kind +
                                "'; available: sine swiss-roll");
  }
  alp::write_csv(out, table);
  std::cout << "wrote " << table.values.rows() << " rows to " << out << "\n";
  return 0;
}

struct TrainFlags {
  std::string data;
  std::vector<std::string> targets;
  std::string model_out;
  double sigma0 = 0.0;  // 0 means default rule
  double mu = 2.0;
  int max_iter = 50;
  std::string variant = "auto-adaptive";
  std::string kernel_mode = "normalize-zero-diag";
};

alp::TrainOptions to_options(const TrainFlags& flags) {
  alp::TrainOptions options;
  if (flags.sigma0 != 0.0) options.sigma0 = flags.sigma0;
  options.mu = flags.mu;
  options.max_iter = flags.max_iter;
  options.variant = alp::lp_variant_from_string(flags.variant);
  options.kernel_mode = alp::kernel_mode_from_string(flags.kernel_mode);
  return options;
}

int cmd_train(const TrainFlags& flags) {
  const Table table = alp::read_csv(flags.data);
  const TargetSplit split = split_targets(table, flags.targets);

  const alp::AlpTrainResult result =
      alp::alp_train(split.features, split.targets, to_options(flags));
  print_train_report(result, split.target_names);
  if (!flags.model_out.empty()) {
    alp::save_model(result.model, flags.model_out);
    std::cout << "model written to " << flags.model_out << "\n";
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data,
                const std::string& out) {
  const alp::AlpModel model = alp::load_model(model_path);
  const Table table = alp::read_csv(data);
  const Index dim = model.train_points.cols();
  if (table.values.cols() < dim) {
    throw std::invalid_argument(
        "data has " + std::to_string(table.values.cols()) +
        " columns but the model expects " + std::to_string(dim) +
        " feature columns (features are read from the leading columns)");
  }
  const Matrix features = table.values.leftCols(dim);
  const Matrix prediction = alp::alp_predict(model, features);

  Table result = table;
  const Index m = prediction.cols();
  for (Index j = 0; j < m; ++j) {
    result.columns.push_back(m == 1 ? "prediction"
                                    : "prediction_" + std::to_string(j));
  }
  Matrix joined(table.values.rows(), table.values.cols() + m);
  joined.leftCols(table.values.cols()) = table.values;
  joined.rightCols(m) = prediction;
  result.values = std::move(joined);
  alp::write_csv(out, result);
  std::cout << "wrote predictions for " << prediction.rows() << " rows to " << out
            << "\n";
  return 0;
}

int cmd_loocv(const std::string& data, const std::string& target, double sigma0,
              double mu, int levels, const std::string& out) {
  const Table table = alp::read_csv(data);
  const TargetSplit split = split_targets(table, {target});

  alp::TrainOptions options;
  if (sigma0 != 0.0) options.sigma0 = sigma0;
  options.mu = mu;
  options.max_iter = levels;
  const alp::AlpTrainResult result =
      alp::alp_train(split.features, split.targets, options);
  const std::vector<double> oracle = alp::exact_loocv_curve(
      split.features, split.targets, result.model.sigma0, result.model.mu, levels);

  const auto& curve = result.report.error_curves[0];
  const std::size_t shared = std::min(curve.size(), oracle.size());
  const auto argmin = [](const double* begin, std::size_t count) {
    return int(std::min_element(begin, begin + count) - begin);
  };
  const int curve_best = argmin(curve.data(), shared);
  const int oracle_best = argmin(oracle.data(), shared);

  std::cout << "level  sigma  training_error  exact_loocv\n";
  for (std::size_t l = 0; l < shared; ++l) {
    std::cout << l << "  " << alp::format_double(result.report.bandwidths[l])
              << "  " << alp::format_double(curve[l]) << "  "
              << alp::format_double(oracle[l]) << "\n";
  }
  std::cout << "training-curve argmin: " << curve_best << "\n";
  std::cout << "exact-loocv argmin: " << oracle_best << "\n";

  if (!out.empty()) {
    Table curves;
    curves.columns = {"level", "sigma", "training_error", "exact_loocv"};
    curves.values.resize(Index(shared), 4);
    for (std::size_t l = 0; l < shared; ++l) {
      curves.values(Index(l), 0) = double(l);
      curves.values(Index(l), 1) = result.report.bandwidths[l];
      curves.values(Index(l), 2) = curve[l];
      curves.values(Index(l), 3) = oracle[l];
    }
    alp::write_csv(out, curves);
    std::cout << "curves written to " << out << "\n";
  }
  return 0;
}

struct DmFlags {
  std::string data;
  std::string out;
  std::string embedding_out;
  std::vector<std::string> drop;
  double sigma = 0.0;  // 0 means percentile rule
  double sigma_percentile = 50.0;
  double alpha = 1.0;
  int t = 1;
  double delta = 0.1;
};

int cmd_dm(const DmFlags& flags) {
  const Table table = alp::read_csv(flags.data);
  std::vector<Index> dropped;
  const Matrix points = drop_columns(table, flags.drop, dropped);

  alp::DmConfig config;
  config.sigma = flags.sigma != 0.0
                     ? flags.sigma
                     : alp::pairwise_distance_percentile(points, flags.sigma_percentile);
  config.alpha = flags.alpha;
  config.t = flags.t;
  config.delta = flags.delta;
  const alp::DiffusionEmbedding embedding = alp::dm_fit(points, config);

  std::cout << "sigma: " << alp::format_double(config.sigma) << "\n";
  std::cout << "retained dimension: " << embedding.dim << "\n";
  std::cout << "eigenvalues:";
  for (Index k = 0; k < embedding.eigenvalues.size(); ++k) {
    std::cout << " " << alp::format_double(embedding.eigenvalues(k));
  }
  std::cout << "\n";

  Table coords;
  for (int k = 1; k <= embedding.dim; ++k) {
    coords.columns.push_back("dm_" + std::to_string(k));
  }
  for (Index c : dropped) coords.columns.push_back(table.columns[std::size_t(c)]);
  coords.values.resize(points.rows(), Index(coords.columns.size()));
  coords.values.leftCols(embedding.dim) = embedding.coordinates;
  for (std::size_t c = 0; c < dropped.size(); ++c) {
    coords.values.col(embedding.dim + Index(c)) = table.values.col(dropped[c]);
  }
  alp::write_csv(flags.out, coords);
  std::cout << "coordinates written to " << flags.out << "\n";

  if (!flags.embedding_out.empty()) {
    alp::save_embedding(embedding, flags.embedding_out);
    std::cout << "embedding written to " << flags.embedding_out << "\n";
  }
  return 0;
}

struct DmExtendFlags {
  std::string train;
  std::string embedding;
  std::string data;
  std::string out;
  std::vector<std::string> drop;
  double sigma = 0.0;
  double sigma_percentile = 50.0;
  double alpha = 1.0;
  int t = 1;
  double delta = 0.1;
  double sigma0 = 0.0;
  double mu = 2.0;
  int max_iter = 50;
};

int cmd_dm_extend(const DmExtendFlags& flags) {
  if (flags.train.empty() == flags.embedding.empty()) {
    throw std::invalid_argument("pass exactly one of --train or --embedding");
  }

  alp::DiffusionEmbedding embedding;
  if (!flags.embedding.empty()) {
    embedding = alp::load_embedding(flags.embedding);
  } else {
    const Table train_table = alp::read_csv(flags.train);
    std::vector<Index> dropped;
    const Matrix train_points = drop_columns(train_table, flags.drop, dropped);
    alp::DmConfig config;
    config.sigma = flags.sigma != 0.0
                       ? flags.sigma
                       : alp::pairwise_distance_percentile(train_points,
                                                           flags.sigma_percentile);
    config.alpha = flags.alpha;
    config.t = flags.t;
    config.delta = flags.delta;
    embedding = alp::dm_fit(train_points, config);
  }

  const Table table = alp::read_csv(flags.data);
  std::vector<Index> dropped;
  const Matrix points = drop_columns(table, flags.drop, dropped);

  alp::TrainOptions options;
  if (flags.sigma0 != 0.0) options.sigma0 = flags.sigma0;
  options.mu = flags.mu;
  options.max_iter = flags.max_iter;
  const Matrix coords = alp::dm_extend(embedding, points, options);

  std::cout << "embedding dimension: " << embedding.dim << "\n";

  Table out;
  for (int k = 1; k <= embedding.dim; ++k) {
    out.columns.push_back("dm_" + std::to_string(k));
  }
  for (Index c : dropped) out.columns.push_back(table.columns[std::size_t(c)]);
  out.values.resize(points.rows(), Index(out.columns.size()));
  out.values.leftCols(embedding.dim) = coords;
  for (std::size_t c = 0; c < dropped.size(); ++c) {
    out.values.col(embedding.dim + Index(c)) = table.values.col(dropped[c]);
  }
  alp::write_csv(flags.out, out);
  std::cout << "extended coordinates written to " << flags.out << "\n";
  return 0;
}

int cmd_kmeans(const std::string& data, int k, std::uint64_t seed,
               const std::vector<std::string>& drop, const std::string& out) {
  const Table table = alp::read_csv(data);
  std::vector<Index> dropped;
  const Matrix points = drop_columns(table, drop, dropped);

  const alp::ClusteringResult clusters = alp::kmeans(points, k, seed);
  std::cout << "iterations: " << clusters.iterations << "\n";
  std::cout << "inertia: " << alp::format_double(clusters.inertia) << "\n";

  Table result = table;
  result.columns.push_back("cluster");
  Matrix joined(table.values.rows(), table.values.cols() + 1);
  joined.leftCols(table.values.cols()) = table.values;
  for (Index i = 0; i < joined.rows(); ++i) {
    joined(i, table.values.cols()) = clusters.labels[std::size_t(i)];
  }
  result.values = std::move(joined);
  alp::write_csv(out, result);
  std::cout << "labels written to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Auto-adaptive Laplacian pyramids: multiscale kernel regression "
               "with built-in leave-one-out stopping, diffusion maps and "
               "out-of-sample extension"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset CSV");
  std::string synth_kind;
  Index synth_n = 1000;
  double synth_noise = 0.0;
  std::uint64_t synth_seed = 0;
  std::string synth_out;
  synth->add_option("kind", synth_kind, "sine or swiss-roll")->required();
  synth->add_option("--n", synth_n, "number of points");
  synth->add_option("--noise", synth_noise, "noise amplitude");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output CSV")->required();

  // train
  auto* train = app.add_subcommand("train", "Train a pyramid model on CSV data");
  TrainFlags train_flags;
  train->add_option("--data", train_flags.data, "input CSV")->required();
  train->add_option("--target", train_flags.targets, "target column (repeatable)")
      ->required();
  train->add_option("--model", train_flags.model_out, "model file to write");
  train->add_option("--sigma0", train_flags.sigma0,
                    "initial bandwidth (default: 2 x median pairwise distance)");
  train->add_option("--mu", train_flags.mu, "bandwidth shrink factor");
  train->add_option("--max-iter", train_flags.max_iter, "maximum levels");
  train->add_option("--variant", train_flags.variant,
                    "auto-adaptive or standard");
  train->add_option("--kernel-mode", train_flags.kernel_mode,
                    "full, zero-diag-normalize or normalize-zero-diag");

  // predict
  auto* predict = app.add_subcommand("predict", "Evaluate a saved model on CSV data");
  std::string predict_model, predict_data, predict_out;
  predict->add_option("--model", predict_model, "model file")->required();
  predict->add_option("--data", predict_data, "input CSV")->required();
  predict->add_option("--out", predict_out, "output CSV")->required();

  // loocv
  auto* loocv = app.add_subcommand(
      "loocv", "Compare the training error curve against exact LOOCV");
  std::string loocv_data, loocv_target, loocv_out;
  double loocv_sigma0 = 0.0, loocv_mu = 2.0;
  int loocv_levels = 12;
  loocv->add_option("--data", loocv_data, "input CSV")->required();
  loocv->add_option("--target", loocv_target, "target column")->required();
  loocv->add_option("--sigma0", loocv_sigma0, "initial bandwidth");
  loocv->add_option("--mu", loocv_mu, "bandwidth shrink factor");
  loocv->add_option("--levels", loocv_levels, "levels to compare");
  loocv->add_option("--out", loocv_out, "curve CSV to write");

  // dm
  auto* dm = app.add_subcommand("dm", "Diffusion-map embedding of CSV data");
  DmFlags dm_flags;
  dm->add_option("--data", dm_flags.data, "input CSV")->required();
  dm->add_option("--out", dm_flags.out, "coordinates CSV")->required();
  dm->add_option("--embedding", dm_flags.embedding_out, "embedding file to write");
  dm->add_option("--drop", dm_flags.drop,
                 "column to exclude from the features (repeatable)");
  dm->add_option("--sigma", dm_flags.sigma, "kernel bandwidth");
  dm->add_option("--sigma-percentile", dm_flags.sigma_percentile,
                 "percentile of pairwise distances used when --sigma is absent");
  dm->add_option("--alpha", dm_flags.alpha, "density normalization exponent");
  dm->add_option("--t", dm_flags.t, "diffusion time");
  dm->add_option("--delta", dm_flags.delta, "relative spectral cutoff");

  // dm-extend
  auto* extend = app.add_subcommand(
      "dm-extend", "Extend a diffusion embedding to new points");
  DmExtendFlags extend_flags;
  extend->add_option("--train", extend_flags.train, "training CSV (fits the embedding)");
  extend->add_option("--embedding", extend_flags.embedding, "saved embedding file");
  extend->add_option("--data", extend_flags.data, "points to extend")->required();
  extend->add_option("--out", extend_flags.out, "coordinates CSV")->required();
  extend->add_option("--drop", extend_flags.drop,
                     "column to exclude from the features (repeatable)");
  extend->add_option("--sigma", extend_flags.sigma, "kernel bandwidth");
  extend->add_option("--sigma-percentile", extend_flags.sigma_percentile,
                     "percentile rule when --sigma is absent");
  extend->add_option("--alpha", extend_flags.alpha, "density normalization exponent");
  extend->add_option("--t", extend_flags.t, "diffusion time");
  extend->add_option("--delta", extend_flags.delta, "relative spectral cutoff");
  extend->add_option("--sigma0", extend_flags.sigma0, "extension pyramid bandwidth");
  extend->add_option("--mu", extend_flags.mu, "extension pyramid shrink factor");
  extend->add_option("--max-iter", extend_flags.max_iter, "extension pyramid levels");

  // kmeans
  auto* km = app.add_subcommand("kmeans", "Cluster CSV rows with k-means");
  std::string km_data, km_out;
  int km_k = 2;
  std::uint64_t km_seed = 0;
  std::vector<std::string> km_drop;
  km->add_option("--data", km_data, "input CSV")->required();
  km->add_option("--k", km_k, "number of clusters")->required();
  km->add_option("--seed", km_seed, "random seed");
  km->add_option("--drop", km_drop, "column to exclude (repeatable)");
  km->add_option("--out", km_out, "output CSV")->required();

  // experiment
  auto* experiment = app.add_subcommand("experiment", "Run a named pipeline");
  std::string experiment_name, experiment_outdir = ".";
  std::uint64_t experiment_seed = 0;
  experiment->add_option("name", experiment_name, "experiment name")->required();
  experiment->add_option("--outdir", experiment_outdir, "output directory");
  experiment->add_option("--seed", experiment_seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    std::cout << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.get_name() << ": " << e.what() << "\n";
    return 1;
  }

  try {
    if (*synth) return cmd_synth(synth_kind, synth_n, synth_noise, synth_seed, synth_out);
    if (*train) return cmd_train(train_flags);
    if (*predict) return cmd_predict(predict_model, predict_data, predict_out);
    if (*loocv) {
      return cmd_loocv(loocv_data, loocv_target, loocv_sigma0, loocv_mu,
                       loocv_levels, loocv_out);
    }
    if (*dm) return cmd_dm(dm_flags);
    if (*extend) return cmd_dm_extend(extend_flags);
    if (*km) return cmd_kmeans(km_data, km_k, km_seed, km_drop, km_out);
    if (*experiment) {
      alp::experiments::run(experiment_name, experiment_outdir, experiment_seed);
      std::cout << "experiment output written to " << experiment_outdir << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
