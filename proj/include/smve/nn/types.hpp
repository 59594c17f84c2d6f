#pragma once

#include <Eigen/Dense>

namespace smve::nn {

/// Batches are row-major: one example per row.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;
using Vector = Eigen::VectorXd;

}  // namespace smve::nn
