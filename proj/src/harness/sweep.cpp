#include "smve/harness/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

#include "smve/harness/control.hpp"
#include "smve/harness/worker_pool.hpp"

namespace smve::harness {

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string() : item.substr(b, e - b + 1));
  }
  return out;
}

bool as_number(const std::string& s, double& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

// Axis assignments sorted by key, independent of the order axes were declared in.
std::string canonical_key(const std::vector<SweepAxis>& axes, const std::vector<std::string>& values) {
  std::vector<std::string> parts;
  for (std::size_t a = 0; a < axes.size(); ++a) parts.push_back(axes[a].key + '=' + values[a]);
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += p + '\x1f';
  return out;
}

std::vector<CurveLog> run_seeds(const ExperimentConfig& config, std::uint64_t first_seed, int count, int workers,
                                const RunFn& run) {
  std::vector<CurveLog> logs(count);
  parallel_for(count, workers, [&](int i) { logs[i] = run(config, first_seed + static_cast<std::uint64_t>(i)); });
  return logs;
}

}  // namespace

SweepSpec parse_sweep_spec(std::string_view text) {
  SweepSpec spec;
  for (const auto& [key, value] : parse_key_values(text)) {
    if (key == "final_seeds") {
      const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), spec.final_seeds);
      if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError("final_seeds", "cannot parse '" + value + "' as an integer");
      }
      continue;
    }
    const std::vector<std::string> values = split_list(value);
    if (values.size() > 1) {
      for (const auto& v : values) set_field(spec.base, key, v);  // parse check
      spec.axes.push_back({key, values});
    } else {
      set_field(spec.base, key, value);
    }
  }
  for (const auto& axis : spec.axes) set_field(spec.base, axis.key, axis.values.front());
  spec.seeds = spec.base.seeds;
  if (spec.final_seeds < 0) throw ConfigError("final_seeds", "must be non-negative");
  return spec;
}

std::vector<GridPoint> expand_grid(const SweepSpec& spec) {
  std::vector<GridPoint> grid(1);
  grid.front().config = spec.base;
  for (const auto& axis : spec.axes) {
    if (axis.values.empty()) throw ConfigError(axis.key, "sweep axis has no values");
    std::vector<GridPoint> next;
    for (const auto& point : grid) {
      for (const auto& v : axis.values) {
        GridPoint p = point;
        set_field(p.config, axis.key, v);
        p.values.push_back(v);
        next.push_back(std::move(p));
      }
    }
    grid = std::move(next);
  }
  for (const auto& p : grid) validate(p.config);
  return grid;
}

std::vector<double> mean_return_curve(const std::vector<CurveLog>& runs, double missing_value) {
  std::size_t length = 0;
  for (const auto& r : runs) length = std::max(length, r.rows.size());
  std::vector<double> curve(length, missing_value);
  for (std::size_t i = 0; i < length; ++i) {
    double sum = 0.0;
    int count = 0;
    for (const auto& r : runs) {
      if (i < r.rows.size() && r.rows[i].avg_return) {
        sum += *r.rows[i].avg_return;
        ++count;
      }
    }
    if (count > 0) curve[i] = sum / count;
  }
  return curve;
}

double second_half_score(const std::vector<double>& curve) {
  double s = 0.0;
  for (std::size_t i = curve.size() / 2; i < curve.size(); ++i) s += curve[i];
  return s;
}

SweepResult run_sweep(const SweepSpec& spec, const RunFn& run) {
  if (spec.seeds < 1) throw ConfigError("seeds", "sweep needs at least one seed per configuration");
  SweepResult result;
  result.grid = expand_grid(spec);
  if (result.grid.empty()) throw ConfigError("sweep", "empty configuration grid");

  for (auto& point : result.grid) {
    const auto logs = run_seeds(point.config, point.config.seed, spec.seeds, spec.workers, run);
    point.mean_curve = mean_return_curve(logs, -static_cast<double>(point.config.episode_cap));
    point.score = second_half_score(point.mean_curve);
  }

  // Ties resolve on the axis values so the winner does not depend on grid order.
  const auto better = [&](const GridPoint& a, const GridPoint& b) {
    if (a.score != b.score) return a.score > b.score;
    return canonical_key(spec.axes, a.values) < canonical_key(spec.axes, b.values);
  };
  for (int i = 1; i < static_cast<int>(result.grid.size()); ++i) {
    if (better(result.grid[i], result.grid[result.best])) result.best = i;
  }

  const GridPoint& winner = result.grid[result.best];
  for (std::size_t a = 0; a < spec.axes.size(); ++a) {
    const auto& axis = spec.axes[a];
    std::vector<double> numbers;
    double v = 0.0;
    for (const auto& text : axis.values) {
      if (!as_number(text, v)) break;
      numbers.push_back(v);
    }
    if (numbers.size() != axis.values.size() || numbers.size() < 2) continue;
    double chosen = 0.0;
    as_number(winner.values[a], chosen);
    const auto [lo, hi] = std::minmax_element(numbers.begin(), numbers.end());
    if (chosen == *lo || chosen == *hi) {
      result.boundary = true;
      result.boundary_axes.push_back(axis.key);
    }
  }

  if (spec.final_seeds > 0) {
    const std::uint64_t fresh = winner.config.seed + static_cast<std::uint64_t>(spec.seeds);
    result.final_runs = run_seeds(winner.config, fresh, spec.final_seeds, spec.workers, run);
    result.final_mean_curve = mean_return_curve(result.final_runs, -static_cast<double>(winner.config.episode_cap));
  }
  return result;
}

SweepResult run_sweep(const SweepSpec& spec) { return run_sweep(spec, run_control); }

}  // namespace smve::harness
