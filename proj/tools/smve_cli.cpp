// Command-line driver for the control, correlation, sweep and regression experiments.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smve/harness/config.hpp"
#include "smve/harness/control.hpp"
#include "smve/harness/regression_study.hpp"
#include "smve/harness/sweep.hpp"
#include "smve/harness/worker_pool.hpp"

namespace fs = std::filesystem;
using namespace smve::harness;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct CommonOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> seeds;
  std::string out = ".";
  int workers = 1;
  std::vector<std::string> overrides;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config_path, "Key-value configuration file");
  cmd->add_option("--seed", o.seed, "Root seed (first seed for multi-seed runs)");
  cmd->add_option("--seeds", o.seeds, "Number of consecutive seeds to run");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_option("--workers", o.workers, "Parallel runs")->check(CLI::PositiveNumber);
  cmd->add_option("--set", o.overrides, "Override a configuration key: key=value");
}

std::vector<std::pair<std::string, std::string>> split_overrides(const std::vector<std::string>& items) {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ConfigError(item, "--set expects key=value");
    out.emplace_back(item.substr(0, eq), item.substr(eq + 1));
  }
  return out;
}

ExperimentConfig build_config(const CommonOptions& o, std::optional<ExperimentKind> kind,
                              const std::vector<std::string>& skip_keys = {}) {
  ExperimentConfig c;
  if (kind) c.kind = *kind;
  std::vector<std::pair<std::string, std::string>> entries;
  if (!o.config_path.empty()) entries = parse_key_values(read_text_file(o.config_path));
  for (auto& kv : split_overrides(o.overrides)) entries.push_back(std::move(kv));
  for (const auto& [key, value] : entries) {
    if (std::find(skip_keys.begin(), skip_keys.end(), key) != skip_keys.end()) continue;
    set_field(c, key, value);
  }
  if (kind && c.kind != *kind) throw ConfigError("kind", "conflicts with the chosen subcommand");
  if (o.seed) c.seed = *o.seed;
  if (o.seeds) c.seeds = *o.seeds;
  validate(c);
  return c;
}

int run_curves(const CommonOptions& o, ExperimentKind kind) {
  const ExperimentConfig c = build_config(o, kind);
  fs::create_directories(o.out);
  std::vector<CurveLog> logs(c.seeds);
  parallel_for(c.seeds, o.workers, [&](int i) { logs[i] = run_control(c, c.seed + static_cast<std::uint64_t>(i)); });
  for (int i = 0; i < c.seeds; ++i) {
    const std::uint64_t seed = c.seed + static_cast<std::uint64_t>(i);
    const fs::path path = fs::path(o.out) / (std::string(to_string(kind)) + "_seed" + std::to_string(seed) + ".csv");
    logs[i].save(path.string());
    const auto& rows = logs[i].rows;
    std::cout << path.string() << ": " << rows.size() << " rows";
    if (!rows.empty() && rows.back().avg_return) std::cout << ", final avg_return " << *rows.back().avg_return;
    std::cout << '\n';
  }
  return 0;
}

int run_sweep_cmd(const CommonOptions& o) {
  if (o.config_path.empty()) throw ConfigError("config", "sweep needs --config");
  std::string text = read_text_file(o.config_path);
  for (const auto& [key, value] : split_overrides(o.overrides)) text += "\n" + key + " = " + value;
  if (o.seed) text += "\nseed = " + std::to_string(*o.seed);
  if (o.seeds) text += "\nseeds = " + std::to_string(*o.seeds);
  SweepSpec spec = parse_sweep_spec(text);
  spec.workers = o.workers;
  const SweepResult result = run_sweep(spec);

  fs::create_directories(o.out);
  std::ofstream summary(fs::path(o.out) / "sweep_summary.csv");
  for (const auto& axis : spec.axes) summary << axis.key << ',';
  summary << "score,best\n";
  for (std::size_t i = 0; i < result.grid.size(); ++i) {
    for (const auto& v : result.grid[i].values) summary << v << ',';
    summary << format_metric(result.grid[i].score) << ',' << (static_cast<int>(i) == result.best ? 1 : 0) << '\n';
  }
  for (const auto& log : result.final_runs) {
    std::string seed = "unknown";
    for (const auto& [k, v] : log.metadata) {
      if (k == "seed") seed = v;
    }
    log.save((fs::path(o.out) / ("final_seed" + seed + ".csv")).string());
  }
  const GridPoint& best = result.grid[result.best];
  std::cout << "best configuration:";
  for (std::size_t a = 0; a < spec.axes.size(); ++a) std::cout << ' ' << spec.axes[a].key << '=' << best.values[a];
  std::cout << "\nscore " << format_metric(best.score) << '\n';
  if (result.boundary) {
    std::cout << "warning: winner lies on the boundary of:";
    for (const auto& k : result.boundary_axes) std::cout << ' ' << k;
    std::cout << " (widen the range and re-run)\n";
  }
  return 0;
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int run_regression_cmd(const CommonOptions& o, const std::string& methods, const std::string& capacities,
                       const std::string& lrs) {
  ExperimentConfig base = build_config(o, ExperimentKind::kRegression);
  const auto method_list = methods.empty() ? std::vector<std::string>{base.method} : split_commas(methods);
  const auto capacity_list = capacities.empty() ? std::vector<std::string>{base.capacity} : split_commas(capacities);
  const auto lr_list = lrs.empty() ? std::vector<std::string>{get_field(base, "regression_lr")} : split_commas(lrs);

  std::vector<ExperimentConfig> jobs;
  for (const auto& m : method_list) {
    for (const auto& cap : capacity_list) {
      for (const auto& lr : lr_list) {
        ExperimentConfig c = base;
        set_field(c, "method", m);
        set_field(c, "capacity", cap);
        set_field(c, "regression_lr", lr);
        validate(c);
        jobs.push_back(c);
      }
    }
  }
  fs::create_directories(o.out);
  std::vector<RegressionCurve> curves(jobs.size());
  parallel_for(static_cast<int>(jobs.size()), o.workers,
               [&](int i) { curves[i] = run_regression(jobs[i], jobs[i].seed); });
  for (const auto& curve : curves) {
    const fs::path path = fs::path(o.out) / regression_file_name(curve);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    write_regression_csv(curve, out);
    std::cout << path.string() << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Selective model-based value expansion experiments"};
  app.require_subcommand(1);

  CommonOptions control_opts, correlation_opts, sweep_opts, regression_opts;
  std::string methods, capacities, lrs;
  auto* control = app.add_subcommand("control", "Acrobot learning curves for one configuration");
  add_common(control, control_opts);
  auto* correlation = app.add_subcommand("correlation", "Variance/error correlation over training");
  add_common(correlation, correlation_opts);
  auto* sweep = app.add_subcommand("sweep", "Hyper-parameter sweep with final re-runs");
  add_common(sweep, sweep_opts);
  auto* regression = app.add_subcommand("regression", "Uncertainty methods on the 1-D benchmark");
  add_common(regression, regression_opts);
  regression->add_option("--methods", methods, "Comma-separated methods (default: config method)");
  regression->add_option("--capacities", capacities, "Comma-separated capacities (default: config capacity)");
  regression->add_option("--lrs", lrs, "Comma-separated learning rates (default: config regression_lr)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*control) return run_curves(control_opts, ExperimentKind::kControl);
    if (*correlation) return run_curves(correlation_opts, ExperimentKind::kCorrelation);
    if (*sweep) return run_sweep_cmd(sweep_opts);
    if (*regression) return run_regression_cmd(regression_opts, methods, capacities, lrs);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return 0;
}
