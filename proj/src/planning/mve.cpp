#include "smve/planning/mve.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smve::planning {

WeightingMode parse_weighting_mode(std::string_view name) {
  if (name == "uniform") return WeightingMode::kUniform;
  if (name == "learned") return WeightingMode::kLearned;
  if (name == "ensemble") return WeightingMode::kEnsemble;
  if (name == "oracle") return WeightingMode::kOracle;
  if (name == "combined") return WeightingMode::kCombined;
  throw std::invalid_argument("unknown weighting mode '" + std::string(name) + "'");
}

std::string_view to_string(WeightingMode mode) {
  switch (mode) {
    case WeightingMode::kUniform: return "uniform";
    case WeightingMode::kLearned: return "learned";
    case WeightingMode::kEnsemble: return "ensemble";
    case WeightingMode::kOracle: return "oracle";
    case WeightingMode::kCombined: return "combined";
  }
  return "?";
}

namespace {

envs::Observation row_obs(const Matrix& m, Eigen::Index i) { return m.row(i); }

// Continues a rollout whose first step has already been filled in.
void extend_rollout(RolloutResult& out, const uncertainty::DynamicsModel& model, const QAgent& agent) {
  const int n = out.batch_size();
  for (int t = 1; t < out.horizon; ++t) {
    const Matrix& prev = out.states[t - 1];
    const std::vector<char>& prev_done = out.terminal[t - 1];
    std::vector<int> acts = greedy_actions(nn::predict(agent.q_net, prev));
    const uncertainty::Prediction pred = model.predict(prev, acts);

    Matrix next = prev;
    std::vector<char> done(n, 1);
    for (int i = 0; i < n; ++i) {
      if (prev_done[i]) continue;
      next.row(i) = pred.mean.row(i);
      out.rewards(i, t) = envs::true_reward(row_obs(prev, i), acts[i], row_obs(next, i));
      out.variances(i, t) = pred.scalar_var(i);
      done[i] = envs::observation_terminal(row_obs(next, i));
    }
    out.states.push_back(std::move(next));
    out.actions.push_back(std::move(acts));
    out.terminal.push_back(std::move(done));
  }
}

RolloutResult start_rollout(const Matrix& s0, std::span<const int> a0, int horizon) {
  if (horizon < 1) throw std::invalid_argument("rollout horizon must be at least 1");
  if (s0.rows() == 0) throw std::invalid_argument("rollout needs at least one start state");
  RolloutResult out;
  out.horizon = horizon;
  out.start_states = s0;
  out.rewards = Matrix::Zero(s0.rows(), horizon);
  out.variances = Matrix::Zero(s0.rows(), horizon);
  out.actions.emplace_back(a0.begin(), a0.end());
  return out;
}

}  // namespace

RolloutResult simulate_rollout(const uncertainty::DynamicsModel& model, const QAgent& agent, const Matrix& s0,
                               std::span<const int> a0, int horizon) {
  RolloutResult out = start_rollout(s0, a0, horizon);
  const uncertainty::Prediction pred = model.predict(s0, a0);
  out.first_model_mean = pred.mean;
  std::vector<char> done(s0.rows());
  for (Eigen::Index i = 0; i < s0.rows(); ++i) {
    out.rewards(i, 0) = envs::true_reward(row_obs(s0, i), a0[i], row_obs(pred.mean, i));
    out.variances(i, 0) = pred.scalar_var(i);
    done[i] = envs::observation_terminal(row_obs(pred.mean, i));
  }
  out.states.push_back(pred.mean);
  out.terminal.push_back(std::move(done));
  extend_rollout(out, model, agent);
  return out;
}

RolloutResult simulate_rollout(const uncertainty::DynamicsModel& model, const QAgent& agent,
                               const envs::Observation& s0, envs::Action a0, int horizon) {
  const int action[1] = {a0};
  return simulate_rollout(model, agent, Matrix(s0), action, horizon);
}

RolloutResult rollout_from_transitions(const uncertainty::DynamicsModel& model, const QAgent& agent,
                                       const TransitionBatch& batch, int horizon) {
  RolloutResult out = start_rollout(batch.s, batch.a, horizon);
  const uncertainty::Prediction pred = model.predict(batch.s, batch.a);
  out.first_model_mean = pred.mean;
  std::vector<char> done(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    out.rewards(i, 0) = batch.r(i);
    out.variances(i, 0) = pred.scalar_var(i);
    done[i] = batch.terminal[i];
  }
  out.states.push_back(batch.s_next);
  out.terminal.push_back(std::move(done));
  extend_rollout(out, model, agent);
  return out;
}

Matrix h_step_targets(const RolloutResult& rollout, const QAgent& agent) {
  const int n = rollout.batch_size();
  const int horizon = rollout.horizon;
  Matrix targets(n, horizon);
  Vector returns = Vector::Zero(n);
  double discount = 1.0;
  for (int h = 1; h <= horizon; ++h) {
    returns += discount * rollout.rewards.col(h - 1);
    discount *= agent.gamma;
    const Vector bootstrap = nn::predict(agent.target_net, rollout.states[h - 1]).rowwise().maxCoeff();
    for (int i = 0; i < n; ++i) {
      targets(i, h - 1) = rollout.terminal[h - 1][i] ? returns(i) : returns(i) + discount * bootstrap(i);
    }
  }
  return targets;
}

Vector cumulative_variances(const Vector& per_step) {
  Vector out(per_step.size());
  double acc = 0.0;
  for (Eigen::Index h = 0; h < per_step.size(); ++h) {
    acc += per_step(h);
    out(h) = acc;
  }
  return out;
}

Matrix cumulative_variances(const Matrix& per_step) {
  Matrix out(per_step.rows(), per_step.cols());
  for (Eigen::Index i = 0; i < per_step.rows(); ++i) {
    out.row(i) = cumulative_variances(Vector(per_step.row(i).transpose())).transpose();
  }
  return out;
}

Vector selective_weights(const Vector& cum_vars, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("selective_weights: tau must be positive");
  if (cum_vars.size() == 0) throw std::invalid_argument("selective_weights: empty input");
  const Vector logits = -cum_vars / tau;
  const Vector e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Matrix selective_weights(const Matrix& cum_vars, double tau) {
  Matrix out(cum_vars.rows(), cum_vars.cols());
  for (Eigen::Index i = 0; i < cum_vars.rows(); ++i) {
    out.row(i) = selective_weights(Vector(cum_vars.row(i).transpose()), tau).transpose();
  }
  return out;
}

Vector uniform_weights(int horizon) {
  if (horizon < 1) throw std::invalid_argument("uniform_weights: horizon must be positive");
  return Vector::Constant(horizon, 1.0 / static_cast<double>(horizon));
}

double weighted_target(const Vector& targets, const Vector& weights) {
  if (targets.size() != weights.size()) throw std::invalid_argument("weighted_target: length mismatch");
  if (std::abs(weights.sum() - 1.0) > 1e-9) throw std::invalid_argument("weighted_target: weights must sum to 1");
  double acc = 0.0;
  for (Eigen::Index h = 0; h < targets.size(); ++h) acc += weights(h) * targets(h);
  return acc;
}

double expected_rollout_length(const Vector& weights) {
  double acc = 0.0;
  for (Eigen::Index h = 0; h < weights.size(); ++h) acc += static_cast<double>(h + 1) * weights(h);
  return acc;
}

Matrix oracle_variances(const RolloutResult& rollout, const TrueStep& true_step) {
  const int n = rollout.batch_size();
  Matrix out = Matrix::Zero(n, rollout.horizon);
  for (int i = 0; i < n; ++i) {
    const envs::Observation truth = true_step(row_obs(rollout.start_states, i), rollout.actions[0][i]);
    out(i, 0) = (row_obs(rollout.first_model_mean, i) - truth).squaredNorm();
    for (int t = 1; t < rollout.horizon; ++t) {
      if (rollout.terminal[t - 1][i]) break;
      const envs::Observation next = true_step(row_obs(rollout.states[t - 1], i), rollout.actions[t][i]);
      out(i, t) = (row_obs(rollout.states[t], i) - next).squaredNorm();
    }
  }
  return out;
}

MveTargets mve_targets(const QAgent& agent, const uncertainty::DynamicsModel& model, const TransitionBatch& batch,
                       const MveOptions& options, const TrueStep& true_step) {
  if (batch.size() == 0) throw std::invalid_argument("mve: empty batch");
  const RolloutResult rollout = rollout_from_transitions(model, agent, batch, options.horizon);
  MveTargets out;
  out.h_step = h_step_targets(rollout, agent);
  switch (options.mode) {
    case WeightingMode::kUniform:
      out.weights = uniform_weights(options.horizon).transpose().replicate(batch.size(), 1);
      break;
    case WeightingMode::kOracle:
      out.weights = selective_weights(cumulative_variances(oracle_variances(rollout, true_step)), options.tau);
      break;
    case WeightingMode::kLearned:
    case WeightingMode::kEnsemble:
    case WeightingMode::kCombined:
      out.weights = selective_weights(cumulative_variances(rollout.variances), options.tau);
      break;
  }
  out.targets.resize(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    out.targets(i) = weighted_target(out.h_step.row(i).transpose(), out.weights.row(i).transpose());
  }
  return out;
}

MveStats mve_update(QAgent& agent, const uncertainty::DynamicsModel& model, const TransitionBatch& batch,
                    const MveOptions& options, double lr, const TrueStep& true_step) {
  const MveTargets t = mve_targets(agent, model, batch, options, true_step);
  MveStats stats;
  for (Eigen::Index i = 0; i < t.weights.rows(); ++i) {
    stats.expected_rollout_length += expected_rollout_length(t.weights.row(i).transpose());
  }
  stats.expected_rollout_length /= static_cast<double>(t.weights.rows());
  stats.loss = q_regression_step(agent, batch.s, batch.a, t.targets, lr);
  return stats;
}

}  // namespace smve::planning
