#include "alp/io.hpp"

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace alp {

namespace {

constexpr std::uint32_t kByteOrderMark = 0x01020304u;
constexpr std::uint32_t kModelVersion = 1;
constexpr std::uint32_t kEmbeddingVersion = 1;
constexpr char kModelMagic[8] = {'A', 'L', 'P', 'M', 'O', 'D', 'E', 'L'};
constexpr char kEmbeddingMagic[8] = {'A', 'L', 'P', 'E', 'M', 'B', 'E', 'D'};

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw std::runtime_error(path + ": " + what);
}

[[noreturn]] void fail_at(const std::string& path, std::size_t line,
                          const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + what);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_field(const std::string& path, std::size_t line,
                   const std::string& field, const std::string& column) {
  double value = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end) {
    fail_at(path, line,
            "cannot parse '" + field + "' in column '" + column + "' as a number");
  }
  return value;
}

struct Writer {
  std::ofstream out;
  std::string path;

  Writer(const std::string& p) : out(p, std::ios::binary), path(p) {
    if (!out) fail(p, "cannot open file for writing");
  }
  void bytes(const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), std::streamsize(size));
    if (!out) fail(path, "write failed");
  }
  void u32(std::uint32_t v) { bytes(&v, sizeof v); }
  void u64(std::uint64_t v) { bytes(&v, sizeof v); }
  void f64(double v) { bytes(&v, sizeof v); }
  void matrix(const Matrix& m) {
    // Dimensions are carried by the surrounding header.
    bytes(m.data(), sizeof(double) * std::size_t(m.size()));
  }
  void vector(const Vector& v) {
    bytes(v.data(), sizeof(double) * std::size_t(v.size()));
  }
};

struct Reader {
  std::ifstream in;
  std::string path;

  Reader(const std::string& p) : in(p, std::ios::binary), path(p) {
    if (!in) fail(p, "cannot open file");
  }
  void bytes(void* data, std::size_t size) {
    in.read(static_cast<char*>(data), std::streamsize(size));
    if (std::size_t(in.gcount()) != size) fail(path, "file truncated");
  }
  std::uint32_t u32() { std::uint32_t v; bytes(&v, sizeof v); return v; }
  std::uint64_t u64() { std::uint64_t v; bytes(&v, sizeof v); return v; }
  double f64() { double v; bytes(&v, sizeof v); return v; }
  Matrix matrix(Index rows, Index cols) {
    Matrix m(rows, cols);
    bytes(m.data(), sizeof(double) * std::size_t(m.size()));
    return m;
  }
  Vector vector(Index size) {
    Vector v(size);
    bytes(v.data(), sizeof(double) * std::size_t(v.size()));
    return v;
  }
  void expect_end() {
    in.peek();
    if (!in.eof()) fail(path, "trailing bytes after payload");
  }
};

void write_preamble(Writer& w, const char magic[8], std::uint32_t version) {
  w.bytes(magic, 8);
  w.u32(kByteOrderMark);
  w.u32(version);
}

void read_preamble(Reader& r, const char magic[8], std::uint32_t version,
                   const char* kind) {
  char found[8];
  r.bytes(found, 8);
  if (std::memcmp(found, magic, 8) != 0) {
    fail(r.path, std::string("not a ") + kind + " file (bad magic)");
  }
  if (r.u32() != kByteOrderMark) {
    fail(r.path, "byte order does not match this machine");
  }
  const std::uint32_t got = r.u32();
  if (got != version) {
    fail(r.path, std::string("unsupported ") + kind + " format version " +
                     std::to_string(got));
  }
}

Index checked_index(const Reader& r, std::uint64_t v, const char* what) {
  if (v > (std::uint64_t(1) << 40)) {
    throw std::runtime_error(r.path + ": implausible " + std::string(what) +
                             " (corrupt file?)");
  }
  return Index(v);
}

}  // namespace

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

Table read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open file");

  std::string line;
  if (!std::getline(in, line)) fail(path, "empty file (header row expected)");
  strip_cr(line);
  Table table;
  table.columns = split_fields(line);
  const std::size_t ncols = table.columns.size();
  for (std::size_t c = 0; c < ncols; ++c) {
    if (table.columns[c].empty()) {
      fail_at(path, 1, "empty column name in header");
    }
  }

  std::vector<double> flat;
  std::size_t lineno = 1;
  std::size_t nrows = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != ncols) {
      fail_at(path, lineno,
              "expected " + std::to_string(ncols) + " fields, got " +
                  std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < ncols; ++c) {
      flat.push_back(parse_field(path, lineno, fields[c], table.columns[c]));
    }
    ++nrows;
  }

  table.values.resize(Index(nrows), Index(ncols));
  std::memcpy(table.values.data(), flat.data(), sizeof(double) * flat.size());
  return table;
}

void write_csv(const std::string& path, const Table& table) {
  if (Index(table.columns.size()) != table.values.cols()) {
    throw std::invalid_argument("write_csv: header width does not match values");
  }
  std::ofstream out(path);
  if (!out) fail(path, "cannot open file for writing");
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out << ',';
    out << table.columns[c];
  }
  out << '\n';
  for (Index i = 0; i < table.values.rows(); ++i) {
    for (Index j = 0; j < table.values.cols(); ++j) {
      if (j) out << ',';
      out << format_double(table.values(i, j));
    }
    out << '\n';
  }
  if (!out) fail(path, "write failed");
}

void save_model(const AlpModel& model, const std::string& path) {
  if (model.residuals.empty()) {
    throw std::invalid_argument("save_model: model has no trained levels");
  }
  Writer w(path);
  write_preamble(w, kModelMagic, kModelVersion);
  w.u64(std::uint64_t(model.train_points.rows()));
  w.u64(std::uint64_t(model.train_points.cols()));
  w.u64(std::uint64_t(model.residuals[0].cols()));
  w.u64(std::uint64_t(model.residuals.size()));
  w.f64(model.sigma0);
  w.f64(model.mu);
  w.f64(model.kernel_denom);
  w.u32(std::uint32_t(model.kernel_mode));
  w.u32(std::uint32_t(model.variant));
  for (int best : model.optimal_iter) w.u64(std::uint64_t(best));
  w.matrix(model.train_points);
  for (const Matrix& r : model.residuals) w.matrix(r);
}

AlpModel load_model(const std::string& path) {
  Reader r(path);
  read_preamble(r, kModelMagic, kModelVersion, "model");
  const Index n = checked_index(r, r.u64(), "training size");
  const Index dim = checked_index(r, r.u64(), "point dimension");
  const Index m = checked_index(r, r.u64(), "output count");
  const Index levels = checked_index(r, r.u64(), "level count");

  AlpModel model;
  model.sigma0 = r.f64();
  model.mu = r.f64();
  model.kernel_denom = r.f64();
  const std::uint32_t mode = r.u32();
  if (mode > std::uint32_t(KernelMode::normalize_then_zero_diag)) {
    fail(path, "unknown kernel mode tag");
  }
  model.kernel_mode = KernelMode(mode);
  const std::uint32_t variant = r.u32();
  if (variant > std::uint32_t(LpVariant::auto_adaptive)) {
    fail(path, "unknown variant tag");
  }
  model.variant = LpVariant(variant);
  if (!(model.sigma0 > 0.0) || !(model.mu > 1.0) || !(model.kernel_denom > 0.0)) {
    fail(path, "invalid bandwidth parameters (corrupt file?)");
  }

  model.optimal_iter.resize(std::size_t(m));
  for (Index j = 0; j < m; ++j) {
    const std::uint64_t best = r.u64();
    if (best >= std::uint64_t(levels)) {
      fail(path, "optimal level outside stored levels (corrupt file?)");
    }
    model.optimal_iter[std::size_t(j)] = int(best);
  }
  model.train_points = r.matrix(n, dim);
  model.residuals.reserve(std::size_t(levels));
  for (Index l = 0; l < levels; ++l) {
    model.residuals.push_back(r.matrix(n, m));
  }
  r.expect_end();
  return model;
}

void save_embedding(const DiffusionEmbedding& embedding, const std::string& path) {
  if (embedding.dim < 1) {
    throw std::invalid_argument("save_embedding: embedding is not fitted");
  }
  Writer w(path);
  write_preamble(w, kEmbeddingMagic, kEmbeddingVersion);
  const Index n = embedding.train_points.rows();
  w.u64(std::uint64_t(n));
  w.u64(std::uint64_t(embedding.train_points.cols()));
  w.u64(std::uint64_t(embedding.dim));
  w.f64(embedding.config.sigma);
  w.f64(embedding.config.alpha);
  w.f64(embedding.config.delta);
  w.f64(embedding.config.kernel_denom);
  w.u64(std::uint64_t(embedding.config.t));
  w.vector(embedding.eigenvalues);
  w.matrix(embedding.eigenvectors);
  w.matrix(embedding.coordinates);
  w.vector(embedding.degrees);
  w.vector(embedding.alpha_degrees);
  w.vector(embedding.all_eigenvalues);
  w.matrix(embedding.all_eigenvectors);
  w.matrix(embedding.train_points);
}

DiffusionEmbedding load_embedding(const std::string& path) {
  Reader r(path);
  read_preamble(r, kEmbeddingMagic, kEmbeddingVersion, "embedding");
  const Index n = checked_index(r, r.u64(), "sample size");
  const Index dim_points = checked_index(r, r.u64(), "point dimension");
  const Index dim = checked_index(r, r.u64(), "embedding dimension");
  if (dim < 1 || dim >= n) fail(path, "invalid embedding dimension");

  DiffusionEmbedding emb;
  emb.dim = int(dim);
  emb.config.sigma = r.f64();
  emb.config.alpha = r.f64();
  emb.config.delta = r.f64();
  emb.config.kernel_denom = r.f64();
  emb.config.t = int(checked_index(r, r.u64(), "diffusion time"));
  if (!(emb.config.sigma > 0.0) || emb.config.t < 1) {
    fail(path, "invalid embedding parameters (corrupt file?)");
  }
  emb.eigenvalues = r.vector(dim + 1);
  emb.eigenvectors = r.matrix(n, dim + 1);
  emb.coordinates = r.matrix(n, dim);
  emb.degrees = r.vector(n);
  emb.alpha_degrees = r.vector(n);
  emb.all_eigenvalues = r.vector(n);
  emb.all_eigenvectors = r.matrix(n, n);
  emb.train_points = r.matrix(n, dim_points);
  r.expect_end();
  return emb;
}

}  // namespace alp
