#pragma once

#include <Eigen/Dense>

namespace alp {

// Row-major storage throughout: samples are rows, so per-row kernel loops
// touch contiguous memory and serialization is a flat row-major dump.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace alp
