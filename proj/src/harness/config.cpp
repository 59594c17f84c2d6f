#include "smve/harness/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace smve::harness {

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kControl: return "control";
    case ExperimentKind::kRegression: return "regression";
    case ExperimentKind::kCorrelation: return "correlation";
  }
  return "?";
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kDqn: return "dqn";
    case AgentKind::kMve: return "mve";
    case AgentKind::kSelectiveMve: return "selective-mve";
  }
  return "?";
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  const std::string t = trim(text);
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
    throw ConfigError(std::string(key), "cannot parse '" + t + "' as a number");
  }
  return value;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ec == std::errc() ? ptr : buf);
}

ExperimentKind parse_kind(std::string_view v) {
  if (v == "control") return ExperimentKind::kControl;
  if (v == "regression") return ExperimentKind::kRegression;
  if (v == "correlation") return ExperimentKind::kCorrelation;
  throw ConfigError("kind", "expected control, regression or correlation, got '" + std::string(v) + "'");
}

AgentKind parse_agent(std::string_view v) {
  if (v == "dqn") return AgentKind::kDqn;
  if (v == "mve") return AgentKind::kMve;
  if (v == "selective-mve") return AgentKind::kSelectiveMve;
  throw ConfigError("agent", "expected dqn, mve or selective-mve, got '" + std::string(v) + "'");
}

struct Field {
  std::function<void(ExperimentConfig&, std::string_view)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

template <typename T>
Field number_field(const char* key, T ExperimentConfig::*member) {
  Field f;
  f.set = [key, member](ExperimentConfig& c, std::string_view v) { c.*member = parse_number<T>(key, v); };
  f.get = [member](const ExperimentConfig& c) {
    if constexpr (std::is_floating_point_v<T>) {
      return format_double(c.*member);
    } else {
      return std::to_string(c.*member);
    }
  };
  return f;
}

Field string_field(std::string ExperimentConfig::*member) {
  Field f;
  f.set = [member](ExperimentConfig& c, std::string_view v) { c.*member = trim(v); };
  f.get = [member](const ExperimentConfig& c) { return c.*member; };
  return f;
}

const std::vector<std::pair<std::string, Field>>& field_table() {
  static const std::vector<std::pair<std::string, Field>> table = [] {
    std::vector<std::pair<std::string, Field>> t;
    t.emplace_back("kind", Field{[](ExperimentConfig& c, std::string_view v) { c.kind = parse_kind(trim(v)); },
                                 [](const ExperimentConfig& c) { return std::string(to_string(c.kind)); }});
    t.emplace_back("agent", Field{[](ExperimentConfig& c, std::string_view v) { c.agent = parse_agent(trim(v)); },
                                  [](const ExperimentConfig& c) { return std::string(to_string(c.agent)); }});
    t.emplace_back("weighting", Field{[](ExperimentConfig& c, std::string_view v) {
                                        try {
                                          c.weighting = planning::parse_weighting_mode(trim(v));
                                        } catch (const std::invalid_argument& e) {
                                          throw ConfigError("weighting", e.what());
                                        }
                                      },
                                      [](const ExperimentConfig& c) {
                                        return std::string(planning::to_string(c.weighting));
                                      }});
    t.emplace_back("value_arch", string_field(&ExperimentConfig::value_arch));
    t.emplace_back("model_hidden", number_field("model_hidden", &ExperimentConfig::model_hidden));
    t.emplace_back("model_loss", string_field(&ExperimentConfig::model_loss));
    t.emplace_back("ensemble_size", number_field("ensemble_size", &ExperimentConfig::ensemble_size));
    t.emplace_back("horizon", number_field("horizon", &ExperimentConfig::horizon));
    t.emplace_back("tau", number_field("tau", &ExperimentConfig::tau));
    t.emplace_back("lr", number_field("lr", &ExperimentConfig::lr));
    t.emplace_back("model_lr", number_field("model_lr", &ExperimentConfig::model_lr));
    t.emplace_back("batch_size", number_field("batch_size", &ExperimentConfig::batch_size));
    t.emplace_back("model_batch_size", number_field("model_batch_size", &ExperimentConfig::model_batch_size));
    t.emplace_back("replay_capacity", number_field("replay_capacity", &ExperimentConfig::replay_capacity));
    t.emplace_back("total_steps", number_field("total_steps", &ExperimentConfig::total_steps));
    t.emplace_back("warmup", number_field("warmup", &ExperimentConfig::warmup));
    t.emplace_back("log_every", number_field("log_every", &ExperimentConfig::log_every));
    t.emplace_back("target_sync", number_field("target_sync", &ExperimentConfig::target_sync));
    t.emplace_back("epsilon", number_field("epsilon", &ExperimentConfig::epsilon));
    t.emplace_back("gamma", number_field("gamma", &ExperimentConfig::gamma));
    t.emplace_back("episode_cap", number_field("episode_cap", &ExperimentConfig::episode_cap));
    t.emplace_back("return_window", number_field("return_window", &ExperimentConfig::return_window));
    t.emplace_back("method", string_field(&ExperimentConfig::method));
    t.emplace_back("capacity", string_field(&ExperimentConfig::capacity));
    t.emplace_back("regression_lr", number_field("regression_lr", &ExperimentConfig::regression_lr));
    t.emplace_back("epochs", number_field("epochs", &ExperimentConfig::epochs));
    t.emplace_back("dataset_size", number_field("dataset_size", &ExperimentConfig::dataset_size));
    t.emplace_back("regression_batch", number_field("regression_batch", &ExperimentConfig::regression_batch));
    t.emplace_back("grid_points", number_field("grid_points", &ExperimentConfig::grid_points));
    t.emplace_back("regression_members", number_field("regression_members", &ExperimentConfig::regression_members));
    t.emplace_back("dropout_p", number_field("dropout_p", &ExperimentConfig::dropout_p));
    t.emplace_back("dropout_passes", number_field("dropout_passes", &ExperimentConfig::dropout_passes));
    t.emplace_back("prior_scale", number_field("prior_scale", &ExperimentConfig::prior_scale));
    t.emplace_back("seed", number_field("seed", &ExperimentConfig::seed));
    t.emplace_back("seeds", number_field("seeds", &ExperimentConfig::seeds));
    return t;
  }();
  return table;
}

const Field& find_field(std::string_view key) {
  for (const auto& [name, field] : field_table()) {
    if (name == key) return field;
  }
  throw ConfigError(std::string(key), "unknown configuration key");
}

bool in_set(double v, std::initializer_list<double> legal) {
  return std::any_of(legal.begin(), legal.end(),
                     [v](double x) { return std::abs(v - x) <= 1e-12 * std::max(1.0, std::abs(x)); });
}

template <typename T>
std::string list_text(std::initializer_list<T> legal) {
  std::ostringstream os;
  bool first = true;
  for (const T& x : legal) {
    os << (first ? "" : ", ") << x;
    first = false;
  }
  return os.str();
}

void require(bool ok, const char* field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, field] : field_table()) k.push_back(name);
    return k;
  }();
  return keys;
}

void set_field(ExperimentConfig& config, std::string_view key, std::string_view value) {
  find_field(trim(key)).set(config, value);
}

std::string get_field(const ExperimentConfig& config, std::string_view key) { return find_field(key).get(config); }

std::vector<int> value_hidden_layers(const ExperimentConfig& config) {
  if (config.value_arch == "64") return {64};
  if (config.value_arch == "128") return {128};
  if (config.value_arch == "64x64") return {64, 64};
  if (config.value_arch == "128x128") return {128, 128};
  throw ConfigError("value_arch", "expected 64, 128, 64x64 or 128x128, got '" + config.value_arch + "'");
}

std::string resolved_model_loss(const ExperimentConfig& config) {
  if (config.model_loss != "auto") return config.model_loss;
  if (config.kind == ExperimentKind::kCorrelation) return "hetero";
  switch (config.weighting) {
    case planning::WeightingMode::kUniform:
    case planning::WeightingMode::kEnsemble:
      return "mse";
    default:
      return "hetero";
  }
}

int resolved_ensemble_size(const ExperimentConfig& config) {
  if (config.ensemble_size > 0) return config.ensemble_size;
  return config.kind == ExperimentKind::kCorrelation ? 20 : 5;
}

void validate(const ExperimentConfig& c) {
  using planning::WeightingMode;
  value_hidden_layers(c);
  require(in_set(c.model_hidden, {4, 16, 64, 128}), "model_hidden", "must be one of 4, 16, 64, 128");
  require(c.model_loss == "auto" || c.model_loss == "mse" || c.model_loss == "hetero", "model_loss",
          "must be auto, mse or hetero");
  require(c.ensemble_size >= 0, "ensemble_size", "must be non-negative (0 = default)");
  require(c.horizon >= 1 && c.horizon <= 16, "horizon", "must lie in [1, 16]");
  require(c.tau > 0.0, "tau", "must be positive");
  require(in_set(c.lr, {0.03, 0.01, 0.003, 0.001, 0.0003, 0.0001}), "lr",
          "must be one of " + list_text({0.03, 0.01, 0.003, 0.001, 0.0003, 0.0001}));
  require(in_set(c.model_lr, {0.1, 0.01, 0.001, 0.0001}), "model_lr",
          "must be one of " + list_text({0.1, 0.01, 0.001, 0.0001}));
  require(in_set(c.batch_size, {16, 32, 64}), "batch_size", "must be one of 16, 32, 64");
  require(c.model_batch_size >= 1, "model_batch_size", "must be positive");
  require(in_set(c.replay_capacity, {10000, 20000, 50000}), "replay_capacity",
          "must be one of 10000, 20000, 50000");
  require(c.total_steps >= 1, "total_steps", "must be positive");
  require(c.warmup >= 1, "warmup", "must be positive");
  require(c.warmup <= c.replay_capacity, "warmup", "cannot exceed replay_capacity");
  require(c.log_every >= 1, "log_every", "must be positive");
  require(c.target_sync >= 1, "target_sync", "must be positive");
  require(c.epsilon >= 0.0 && c.epsilon <= 1.0, "epsilon", "must lie in [0, 1]");
  require(c.gamma >= 0.0 && c.gamma <= 1.0, "gamma", "must lie in [0, 1]");
  require(c.episode_cap >= 1, "episode_cap", "must be positive");
  require(c.return_window >= 1, "return_window", "must be positive");

  const std::vector<std::string> methods{"hetero", "ensemble", "rpf", "rpf-bootstrap", "mc-dropout",
                                         "ensemble+hetero"};
  require(std::find(methods.begin(), methods.end(), c.method) != methods.end(), "method",
          "must be one of hetero, ensemble, rpf, rpf-bootstrap, mc-dropout, ensemble+hetero");
  require(c.capacity == "large" || c.capacity == "medium" || c.capacity == "small", "capacity",
          "must be large, medium or small");
  require(in_set(c.regression_lr, {0.01, 0.001, 0.0001}), "regression_lr", "must be one of 0.01, 0.001, 0.0001");
  require(c.epochs >= 1, "epochs", "must be positive");
  require(c.dataset_size >= 1, "dataset_size", "must be positive");
  require(c.regression_batch >= 1, "regression_batch", "must be positive");
  require(c.grid_points >= 2, "grid_points", "must be at least 2");
  require(c.regression_members >= 1, "regression_members", "must be positive");
  require(c.dropout_p >= 0.0 && c.dropout_p < 1.0, "dropout_p", "must lie in [0, 1)");
  require(c.dropout_passes >= 1, "dropout_passes", "must be positive");
  require(c.prior_scale >= 0.0, "prior_scale", "must be non-negative");
  require(c.seeds >= 1, "seeds", "must be positive");

  if (c.kind == ExperimentKind::kControl) {
    if (c.agent == AgentKind::kDqn || c.agent == AgentKind::kMve) {
      require(c.weighting == WeightingMode::kUniform, "weighting", "dqn and mve agents use uniform weighting");
    } else {
      require(c.weighting != WeightingMode::kUniform, "weighting", "selective-mve needs a variance-based weighting");
    }
    const std::string loss = resolved_model_loss(c);
    if (c.weighting == WeightingMode::kLearned || c.weighting == WeightingMode::kCombined) {
      require(loss == "hetero", "model_loss", "learned and combined weighting need a heteroscedastic model");
    }
  }
  if (c.kind == ExperimentKind::kCorrelation) {
    require(resolved_model_loss(c) == "hetero", "model_loss", "correlation runs use heteroscedastic members");
    require(c.weighting != WeightingMode::kOracle, "weighting", "correlation runs weight by a model signal");
    if (c.agent == AgentKind::kSelectiveMve) {
      require(c.weighting != WeightingMode::kUniform, "weighting", "selective-mve needs a variance-based weighting");
    } else {
      require(c.weighting == WeightingMode::kUniform, "weighting", "dqn and mve agents use uniform weighting");
    }
    require(resolved_ensemble_size(c) >= 2, "ensemble_size", "correlation runs need at least two members");
  }
}

std::vector<std::pair<std::string, std::string>> parse_key_values(std::string_view text) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no), "expected 'key = value', got '" + t + "'");
    }
    out.emplace_back(trim(std::string_view(t).substr(0, eq)), trim(std::string_view(t).substr(eq + 1)));
  }
  return out;
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig c;
  for (const auto& [key, value] : parse_key_values(text)) set_field(c, key, value);
  validate(c);
  return c;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

std::string to_text(const ExperimentConfig& config) {
  std::ostringstream os;
  for (const auto& [name, field] : field_table()) os << name << " = " << field.get(config) << '\n';
  return os.str();
}

}  // namespace smve::harness
