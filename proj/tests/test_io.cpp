#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include "alp/diffusion.hpp"
#include "alp/io.hpp"
#include "alp/synthetic.hpp"

using alp::Index;
using alp::Matrix;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("alp_io_test_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

bool contains(const std::string& haystack, const std::string& needle) {
  return haystack.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("csv write and read round trip exactly") {
  TempDir dir;
  alp::Table table;
  table.columns = {"x", "f", "g"};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1e6, 1e6);
  table.values.resize(13, 3);
  for (Index i = 0; i < 13; ++i) {
    for (Index j = 0; j < 3; ++j) table.values(i, j) = dist(rng);
  }
  table.values(0, 0) = 0.1;  // not exactly representable
  table.values(1, 1) = -1.0 / 3.0;

  const std::string path = dir.file("round.csv");
  alp::write_csv(path, table);
  const alp::Table back = alp::read_csv(path);

  CHECK(back.columns == table.columns);
  REQUIRE(back.values.rows() == 13);
  CHECK((back.values.array() == table.values.array()).all());
}

TEST_CASE("csv reader reports malformed rows with line numbers") {
  TempDir dir;
  const std::string path = dir.file("bad.csv");

  write_text(path, "x,f\n1.0,2.0\n3.0\n");
  CHECK_THROWS_WITH_AS(alp::read_csv(path),
                       doctest::Contains(":3: expected 2 fields"),
                       std::runtime_error);

  write_text(path, "x,f\n1.0,2.0\n3.0,oops\n");
  try {
    alp::read_csv(path);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(contains(e.what(), ":3:"));
    CHECK(contains(e.what(), "oops"));
    CHECK(contains(e.what(), "'f'"));
  }

  write_text(path, "");
  CHECK_THROWS_AS(alp::read_csv(path), std::runtime_error);

  CHECK_THROWS_AS(alp::read_csv(dir.file("missing.csv")), std::runtime_error);
}

TEST_CASE("csv reader accepts a header-only file and crlf endings") {
  TempDir dir;
  const std::string path = dir.file("edge.csv");

  write_text(path, "a,b\n");
  const alp::Table empty = alp::read_csv(path);
  CHECK(empty.columns.size() == 2);
  CHECK(empty.values.rows() == 0);

  write_text(path, "a,b\r\n1.5,2.5\r\n");
  const alp::Table crlf = alp::read_csv(path);
  CHECK(crlf.values(0, 1) == 2.5);
}

TEST_CASE("model files round trip and predict identically") {
  TempDir dir;
  const auto data = alp::composite_sine(120, 0.1, 21);
  const auto split = alp::odd_even_split(data.points, data.targets);
  const auto trained = alp::alp_train(split.train_points, split.train_targets);

  const std::string path = dir.file("model.bin");
  alp::save_model(trained.model, path);
  const alp::AlpModel loaded = alp::load_model(path);

  CHECK(loaded.sigma0 == trained.model.sigma0);
  CHECK(loaded.mu == trained.model.mu);
  CHECK(loaded.kernel_denom == trained.model.kernel_denom);
  CHECK(loaded.kernel_mode == trained.model.kernel_mode);
  CHECK(loaded.variant == trained.model.variant);
  CHECK(loaded.optimal_iter == trained.model.optimal_iter);
  REQUIRE(loaded.residuals.size() == trained.model.residuals.size());
  for (std::size_t l = 0; l < loaded.residuals.size(); ++l) {
    CHECK((loaded.residuals[l].array() == trained.model.residuals[l].array()).all());
  }

  const Matrix before = alp::alp_predict(trained.model, split.test_points);
  const Matrix after = alp::alp_predict(loaded, split.test_points);
  CHECK((before.array() == after.array()).all());
}

TEST_CASE("model loader rejects foreign and damaged files") {
  TempDir dir;
  const std::string path = dir.file("junk.bin");

  write_text(path, "definitely not a model");
  CHECK_THROWS_WITH_AS(alp::load_model(path), doctest::Contains("bad magic"),
                       std::runtime_error);

  const auto data = alp::composite_sine(30, 0.1, 22);
  const auto trained = alp::alp_train(data.points, data.targets);
  const std::string good = dir.file("good.bin");
  alp::save_model(trained.model, good);

  // Truncate the valid file.
  const auto size = std::filesystem::file_size(good);
  std::filesystem::resize_file(good, size / 2);
  CHECK_THROWS_WITH_AS(alp::load_model(good), doctest::Contains("truncated"),
                       std::runtime_error);

  // Flip the version field (bytes 12..15 after the 8-byte magic and the
  // byte-order mark).
  alp::save_model(trained.model, good);
  {
    std::fstream patch(good,
                       std::ios::in | std::ios::out | std::ios::binary);
    patch.seekp(12);
    const std::uint32_t bogus = 999;
    patch.write(reinterpret_cast<const char*>(&bogus), sizeof bogus);
  }
  CHECK_THROWS_WITH_AS(alp::load_model(good), doctest::Contains("version"),
                       std::runtime_error);

  CHECK_THROWS_AS(alp::load_model(dir.file("missing.bin")), std::runtime_error);
}

TEST_CASE("embedding files round trip exactly") {
  TempDir dir;
  const auto roll = alp::swiss_roll(60, 0.0, 23);
  alp::DmConfig config;
  config.sigma = alp::default_dm_sigma(roll.points);
  const auto embedding = alp::dm_fit(roll.points, config);

  const std::string path = dir.file("embedding.bin");
  alp::save_embedding(embedding, path);
  const alp::DiffusionEmbedding loaded = alp::load_embedding(path);

  CHECK(loaded.dim == embedding.dim);
  CHECK(loaded.config.sigma == embedding.config.sigma);
  CHECK(loaded.config.alpha == embedding.config.alpha);
  CHECK(loaded.config.t == embedding.config.t);
  CHECK(loaded.config.delta == embedding.config.delta);
  CHECK(loaded.config.kernel_denom == embedding.config.kernel_denom);
  CHECK((loaded.eigenvalues.array() == embedding.eigenvalues.array()).all());
  CHECK((loaded.eigenvectors.array() == embedding.eigenvectors.array()).all());
  CHECK((loaded.coordinates.array() == embedding.coordinates.array()).all());
  CHECK((loaded.all_eigenvalues.array() == embedding.all_eigenvalues.array()).all());
  CHECK((loaded.all_eigenvectors.array() == embedding.all_eigenvectors.array()).all());
  CHECK((loaded.degrees.array() == embedding.degrees.array()).all());
  CHECK((loaded.alpha_degrees.array() == embedding.alpha_degrees.array()).all());
  CHECK((loaded.train_points.array() == embedding.train_points.array()).all());

  // The loaded embedding extends new points exactly like the original.
  const auto probe = alp::swiss_roll(20, 0.0, 24);
  const Matrix a = alp::dm_extend(embedding, probe.points);
  const Matrix b = alp::dm_extend(loaded, probe.points);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("embedding loader rejects model files and vice versa") {
  TempDir dir;
  const auto data = alp::composite_sine(30, 0.1, 25);
  const auto trained = alp::alp_train(data.points, data.targets);
  const std::string model_path = dir.file("model.bin");
  alp::save_model(trained.model, model_path);
  CHECK_THROWS_WITH_AS(alp::load_embedding(model_path),
                       doctest::Contains("bad magic"), std::runtime_error);

  alp::DmConfig config;
  config.sigma = 1.0;
  const auto embedding = alp::dm_fit(data.points, config);
  const std::string emb_path = dir.file("embedding.bin");
  alp::save_embedding(embedding, emb_path);
  CHECK_THROWS_WITH_AS(alp::load_model(emb_path), doctest::Contains("bad magic"),
                       std::runtime_error);
}

TEST_CASE("format_double survives a text round trip") {
  // Extremes stay inside the normal range: glibc's strtod reports ERANGE for
  // subnormal input, which std::stod turns into an exception.
  for (double v : {0.1, -1.0 / 3.0, std::numeric_limits<double>::min(),
                   std::numeric_limits<double>::max(), 12345.678901234567, 0.0}) {
    const std::string text = alp::format_double(v);
    CHECK(std::stod(text) == v);
  }
}
