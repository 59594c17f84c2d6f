#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smve/harness/config.hpp"

namespace smve::harness {

/// Predictions of one trained uncertainty method on the evaluation grid.
struct RegressionCurve {
  std::string method;
  std::string capacity;
  double lr = 0.0;
  std::vector<double> x;
  std::vector<double> y_true;
  std::vector<double> mean;
  std::vector<double> std;
};

/// Mean-network layout for a capacity regime: large 3x64, medium 1x2048, small 1x64.
std::vector<int> regression_layout(const std::string& capacity);

/// `points` evenly spaced inputs covering [-1.5, 2.5], endpoints included.
std::vector<double> evaluation_grid(int points);

/// Trains config.method at config.capacity on the synthetic benchmark and
/// evaluates it on the grid. Deterministic per (config, seed).
RegressionCurve run_regression(const ExperimentConfig& config, std::uint64_t seed);

/// Columns x,y_true,mean,std.
void write_regression_csv(const RegressionCurve& curve, std::ostream& out);
std::string regression_file_name(const RegressionCurve& curve);

}  // namespace smve::harness
