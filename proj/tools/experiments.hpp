#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace alp::experiments {

// Named end-to-end pipelines. Each writes a summary plus plot-ready CSV
// files into outdir; all output is deterministic for a fixed seed.
void run(const std::string& name, const std::string& outdir, std::uint64_t seed);

const std::vector<std::string>& names();

}  // namespace alp::experiments
