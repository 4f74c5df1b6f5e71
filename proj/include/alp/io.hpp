#pragma once

#include <string>
#include <vector>

#include "alp/diffusion.hpp"
#include "alp/pyramid.hpp"

namespace alp {

struct Table {
  std::vector<std::string> columns;
  Matrix values;
};

// Plain numeric CSV: comma separated, one header row, '.' decimal point.
// Parse errors report file and line number. Values are written with 17
// significant digits so a write/read round trip is exact.
Table read_csv(const std::string& path);
void write_csv(const std::string& path, const Table& table);

// Shortest-round-trip decimal rendering used everywhere doubles are printed.
std::string format_double(double value);

// Binary model and embedding files; see docs/formats.md. Both carry a magic
// tag, a byte-order mark and a format version, and loading rejects anything
// it does not recognize. A loaded model predicts bit-identically to the one
// saved.
void save_model(const AlpModel& model, const std::string& path);
AlpModel load_model(const std::string& path);

void save_embedding(const DiffusionEmbedding& embedding, const std::string& path);
DiffusionEmbedding load_embedding(const std::string& path);

}  // namespace alp
