#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "smve/planning/mve.hpp"

namespace smve::harness {

enum class ExperimentKind { kControl, kRegression, kCorrelation };
enum class AgentKind { kDqn, kMve, kSelectiveMve };

std::string_view to_string(ExperimentKind kind);
std::string_view to_string(AgentKind kind);

/// Raised for malformed or out-of-range configuration; names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::kControl;

  // Control and correlation runs.
  AgentKind agent = AgentKind::kDqn;
  planning::WeightingMode weighting = planning::WeightingMode::kUniform;
  std::string value_arch = "128";
  int model_hidden = 4;
  /// auto picks squared error or likelihood from the agent and weighting.
  std::string model_loss = "auto";
  /// 0 selects 5 members for control runs and 20 for correlation runs.
  int ensemble_size = 0;
  int horizon = 4;
  double tau = 0.1;
  double lr = 0.001;
  double model_lr = 0.001;
  int batch_size = 32;
  int model_batch_size = 16;
  int replay_capacity = 50000;
  long total_steps = 400000;
  int warmup = 1000;
  int log_every = 2000;
  int target_sync = 256;
  double epsilon = 0.1;
  double gamma = 1.0;
  int episode_cap = 1000;
  int return_window = 20;

  // Regression study.
  std::string method = "hetero";
  std::string capacity = "large";
  double regression_lr = 0.001;
  int epochs = 300;
  int dataset_size = 5000;
  int regression_batch = 16;
  int grid_points = 1000;
  int regression_members = 10;
  double dropout_p = 0.1;
  int dropout_passes = 10;
  double prior_scale = 1.0;

  std::uint64_t seed = 0;
  int seeds = 10;
};

/// Every recognised key, in canonical order.
const std::vector<std::string>& config_keys();

/// Assigns one key from its text form. Unknown keys and unparsable values throw ConfigError.
void set_field(ExperimentConfig& config, std::string_view key, std::string_view value);
std::string get_field(const ExperimentConfig& config, std::string_view key);

/// Checks every field against its legal set and cross-field consistency.
void validate(const ExperimentConfig& config);

/// Splits "key = value" lines; '#' starts a comment. Keys are not interpreted.
std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text);

/// Parses and validates a flat key-value configuration.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::string& path);
std::string read_text_file(const std::string& path);

/// Round-trippable text form with every key.
std::string to_text(const ExperimentConfig& config);

/// Resolved choices derived from the configuration.
std::vector<int> value_hidden_layers(const ExperimentConfig& config);
std::string resolved_model_loss(const ExperimentConfig& config);
int resolved_ensemble_size(const ExperimentConfig& config);

}  // namespace smve::harness
