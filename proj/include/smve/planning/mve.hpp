#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "smve/planning/agent.hpp"
#include "smve/uncertainty/dynamics.hpp"

namespace smve::planning {

/// How the h-step targets are combined.
///   kUniform  - plain MVE, equal weights
///   kLearned, kEnsemble, kCombined - softmax weights from the model's reported variance
///   kOracle   - softmax weights from the true one-step squared error
enum class WeightingMode { kUniform, kLearned, kEnsemble, kOracle, kCombined };

WeightingMode parse_weighting_mode(std::string_view name);
std::string_view to_string(WeightingMode mode);

/// Batch of simulated trajectories of length `horizon`.
///
/// Step t (1-based) lives at index t-1: states[t-1] is s_t, actions[t-1] is the
/// action taken in s_{t-1} (actions[0] is a_0), rewards(:, t-1) and
/// variances(:, t-1) belong to the transition into s_t. terminal[t-1][i] is set
/// once trajectory i has reached a terminal state at or before step t; after
/// that the state is frozen and rewards and variances are zero.
struct RolloutResult {
  int horizon = 0;
  Matrix start_states;
  /// Model mean prediction for (s_0, a_0), kept for oracle scoring.
  Matrix first_model_mean;
  std::vector<Matrix> states;
  std::vector<std::vector<int>> actions;
  Matrix rewards;
  Matrix variances;
  std::vector<std::vector<char>> terminal;

  int batch_size() const { return static_cast<int>(start_states.rows()); }
};

/// Fully simulated rollouts: s_1 = model mean at (s_0, a_0), later actions greedy
/// under the online network, rewards from the known reward function.
RolloutResult simulate_rollout(const uncertainty::DynamicsModel& model, const QAgent& agent, const Matrix& s0,
                               std::span<const int> a0, int horizon);
RolloutResult simulate_rollout(const uncertainty::DynamicsModel& model, const QAgent& agent,
                               const envs::Observation& s0, envs::Action a0, int horizon);

/// Rollouts whose first step is the real buffered transition (s, a, r, s');
/// the variance of step 1 is still the model's variance at (s, a).
RolloutResult rollout_from_transitions(const uncertainty::DynamicsModel& model, const QAgent& agent,
                                       const TransitionBatch& batch, int horizon);

/// U_h = sum_{t<=h} gamma^{t-1} r_t + gamma^h max_a target(s_h, a), with no
/// bootstrap once the trajectory has terminated. One row per trajectory.
Matrix h_step_targets(const RolloutResult& rollout, const QAgent& agent);

/// Prefix sums along each row.
Matrix cumulative_variances(const Matrix& per_step);
Vector cumulative_variances(const Vector& per_step);

/// w_h = softmax(-cum_h / tau), evaluated with max-subtraction.
Vector selective_weights(const Vector& cum_vars, double tau);
Matrix selective_weights(const Matrix& cum_vars, double tau);
Vector uniform_weights(int horizon);

double weighted_target(const Vector& targets, const Vector& weights);
/// sum_h h * w_h
double expected_rollout_length(const Vector& weights);

using TrueStep = std::function<envs::Observation(const envs::Observation&, envs::Action)>;

/// One-step squared error of the model along the simulated trajectory: step 1
/// compares the model's prediction for (s_0, a_0) with the true successor, step
/// t > 1 compares s_t with the true successor of (s_{t-1}, a_{t-1}).
Matrix oracle_variances(const RolloutResult& rollout, const TrueStep& true_step = envs::true_next_observation);

struct MveOptions {
  int horizon = 4;
  double tau = 0.1;
  WeightingMode mode = WeightingMode::kUniform;
};

struct MveTargets {
  Vector targets;
  Matrix weights;
  Matrix h_step;
};

/// Weighted h-step targets for a batch of real transitions.
MveTargets mve_targets(const QAgent& agent, const uncertainty::DynamicsModel& model, const TransitionBatch& batch,
                       const MveOptions& options, const TrueStep& true_step = envs::true_next_observation);

struct MveStats {
  double loss = 0.0;
  /// Batch mean of the expected rollout length.
  double expected_rollout_length = 0.0;
};

/// One RMSProp step of q(s)[a] toward the weighted target. Plain MVE is
/// kUniform; the other modes are selective MVE.
MveStats mve_update(QAgent& agent, const uncertainty::DynamicsModel& model, const TransitionBatch& batch,
                    const MveOptions& options, double lr,
                    const TrueStep& true_step = envs::true_next_observation);

}  // namespace smve::planning
