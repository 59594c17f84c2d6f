#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "smve/harness/curve_log.hpp"

namespace smve::harness {

struct SweepAxis {
  std::string key;
  std::vector<std::string> values;
};

/// A base configuration plus the axes whose cartesian product forms the grid.
struct SweepSpec {
  ExperimentConfig base;
  std::vector<SweepAxis> axes;
  /// Runs per grid point during selection.
  int seeds = 10;
  /// Fresh runs of the winning configuration.
  int final_seeds = 30;
  int workers = 1;
};

/// Same syntax as a configuration file, except that a comma-separated value
/// defines an axis. "final_seeds" is accepted in addition to config keys.
SweepSpec parse_sweep_spec(std::string_view text);

struct GridPoint {
  std::vector<std::string> values;  ///< one entry per axis
  ExperimentConfig config;
  std::vector<double> mean_curve;
  double score = 0.0;
};

struct SweepResult {
  std::vector<GridPoint> grid;
  int best = 0;
  /// The winner sits on the edge of at least one numeric axis with several values.
  bool boundary = false;
  std::vector<std::string> boundary_axes;
  std::vector<CurveLog> final_runs;
  std::vector<double> final_mean_curve;
};

using RunFn = std::function<CurveLog(const ExperimentConfig&, std::uint64_t)>;

/// Every configuration in the grid, in axis-major order.
std::vector<GridPoint> expand_grid(const SweepSpec& spec);

/// Pointwise mean of avg_return across runs. Points where no run has a value
/// take `missing_value`.
std::vector<double> mean_return_curve(const std::vector<CurveLog>& runs, double missing_value);

/// Sum of the second half of a curve (indices n/2 .. n-1).
double second_half_score(const std::vector<double>& curve);

/// Evaluates every grid point with spec.seeds runs, picks the best score,
/// flags boundary winners and re-runs the winner with spec.final_seeds new seeds.
SweepResult run_sweep(const SweepSpec& spec, const RunFn& run);
SweepResult run_sweep(const SweepSpec& spec);

}  // namespace smve::harness
