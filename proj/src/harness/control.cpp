#include "smve/harness/control.hpp"

#include <deque>
#include <numeric>
#include <optional>

#include "smve/planning/agent.hpp"
#include "smve/planning/metrics.hpp"
#include "smve/planning/mve.hpp"

namespace smve::harness {

namespace {

using planning::WeightingMode;

uncertainty::EnsembleSignal signal_for(WeightingMode mode) {
  switch (mode) {
    case WeightingMode::kLearned: return uncertainty::EnsembleSignal::kLearned;
    case WeightingMode::kCombined: return uncertainty::EnsembleSignal::kCombined;
    default: return uncertainty::EnsembleSignal::kEnsemble;
  }
}

// Running mean over the steps since the last log row.
struct Accumulator {
  double sum = 0.0;
  long count = 0;
  void add(double v) {
    sum += v;
    ++count;
  }
  std::optional<double> take() {
    std::optional<double> out;
    if (count > 0) out = sum / static_cast<double>(count);
    sum = 0.0;
    count = 0;
    return out;
  }
};

std::vector<std::pair<std::string, std::string>> run_metadata(const ExperimentConfig& config, std::uint64_t seed) {
  std::vector<std::pair<std::string, std::string>> meta;
  for (const auto& key : config_keys()) {
    if (key == "seed") continue;
    meta.emplace_back(key, get_field(config, key));
  }
  meta.emplace_back("seed", std::to_string(seed));
  meta.emplace_back("model_loss_resolved", resolved_model_loss(config));
  meta.emplace_back("ensemble_size_resolved", std::to_string(resolved_ensemble_size(config)));
  return meta;
}

}  // namespace

std::unique_ptr<uncertainty::DynamicsModel> make_dynamics_model(const ExperimentConfig& config, Rng& rng) {
  const bool hetero = resolved_model_loss(config) == "hetero";
  if (config.kind == ExperimentKind::kCorrelation) {
    return std::make_unique<uncertainty::EnsembleDynamics>(resolved_ensemble_size(config), config.model_hidden,
                                                           true, signal_for(config.weighting), rng);
  }
  if (config.agent == AgentKind::kDqn) return nullptr;
  if (config.weighting == WeightingMode::kEnsemble || config.weighting == WeightingMode::kCombined) {
    return std::make_unique<uncertainty::EnsembleDynamics>(resolved_ensemble_size(config), config.model_hidden,
                                                           hetero, signal_for(config.weighting), rng);
  }
  if (hetero) return std::make_unique<uncertainty::HeteroDynamics>(config.model_hidden, rng);
  return std::make_unique<uncertainty::DeterministicDynamics>(config.model_hidden, rng);
}

CurveLog run_control(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  if (config.kind == ExperimentKind::kRegression) throw ConfigError("kind", "run_control needs a control or correlation config");

  Rng env_rng(derive_seed(seed, "env"));
  Rng explore_rng(derive_seed(seed, "explore"));
  Rng init_rng(derive_seed(seed, "init"));
  Rng replay_rng(derive_seed(seed, "replay"));
  Rng model_rng(derive_seed(seed, "model"));
  Rng metric_rng(derive_seed(seed, "metric"));

  planning::QAgentOptions agent_options;
  agent_options.hidden = value_hidden_layers(config);
  agent_options.epsilon = config.epsilon;
  agent_options.gamma = config.gamma;
  agent_options.target_sync_steps = config.target_sync;
  planning::QAgent agent(agent_options, init_rng);

  std::unique_ptr<uncertainty::DynamicsModel> model = make_dynamics_model(config, model_rng);
  const auto* ensemble = dynamic_cast<const uncertainty::EnsembleDynamics*>(model.get());
  const bool log_correlation = config.kind == ExperimentKind::kCorrelation;

  planning::MveOptions mve;
  mve.horizon = config.agent == AgentKind::kDqn ? 1 : config.horizon;
  mve.tau = config.tau;
  mve.mode = config.weighting;

  envs::AcrobotEnv env(config.episode_cap);
  planning::ReplayBuffer buffer(config.replay_capacity);

  CurveLog log;
  log.kind = config.kind;
  log.metadata = run_metadata(config, seed);

  std::deque<double> recent_returns;
  double episode_return = 0.0;
  Accumulator rollout_len, model_loss, r_learned, r_ensemble, r_combined;

  envs::Observation obs = env.reset(env_rng);
  for (long step = 1; step <= config.total_steps; ++step) {
    const envs::Action a = planning::epsilon_greedy(agent, obs, explore_rng);
    const envs::AcrobotEnv::Step out = env.step(a);
    buffer.push({obs, a, out.reward, out.obs, out.terminal, out.truncated});
    episode_return += out.reward;
    if (out.terminal || out.truncated) {
      recent_returns.push_back(episode_return);
      if (static_cast<int>(recent_returns.size()) > config.return_window) recent_returns.pop_front();
      episode_return = 0.0;
      obs = env.reset(env_rng);
    } else {
      obs = out.obs;
    }

    if (buffer.size() >= config.warmup) {
      if (model) {
        const planning::TransitionBatch mb = buffer.sample(config.model_batch_size, replay_rng);
        model_loss.add(model->update(mb.s, mb.a, mb.s_next, config.model_lr));
      }
      const planning::TransitionBatch batch = buffer.sample(config.batch_size, replay_rng);
      if (config.agent == AgentKind::kDqn) {
        planning::dqn_update(agent, batch, config.lr);
      } else {
        const planning::MveStats stats = planning::mve_update(agent, *model, batch, mve, config.lr);
        rollout_len.add(stats.expected_rollout_length);
      }
      if (log_correlation && ensemble) {
        const auto corr = planning::variance_error_correlation(*ensemble, buffer, config.batch_size, metric_rng);
        r_learned.add(corr.learned.r);
        r_ensemble.add(corr.ensemble.r);
        r_combined.add(corr.combined.r);
      }
    }
    if (step % agent.target_sync_steps == 0) agent.sync_target();

    if (step % config.log_every == 0) {
      CurveRow row;
      row.step = step;
      if (!recent_returns.empty()) {
        row.avg_return = std::accumulate(recent_returns.begin(), recent_returns.end(), 0.0) /
                         static_cast<double>(recent_returns.size());
      }
      row.expected_rollout_len = rollout_len.take();
      row.model_loss = model_loss.take();
      if (log_correlation) {
        row.r_learned = r_learned.take();
        row.r_ensemble = r_ensemble.take();
        row.r_combined = r_combined.take();
      }
      log.rows.push_back(row);
    }
  }
  return log;
}

CurveLog run_correlation(const ExperimentConfig& config, std::uint64_t seed) {
  if (config.kind != ExperimentKind::kCorrelation) throw ConfigError("kind", "run_correlation needs kind = correlation");
  return run_control(config, seed);
}

}  // namespace smve::harness
