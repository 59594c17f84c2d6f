#pragma once

#include <vector>

#include "smve/nn/mlp.hpp"
#include "smve/nn/optim.hpp"
#include "smve/planning/replay.hpp"

namespace smve::planning {

struct QAgentOptions {
  /// Hidden layer widths of the action-value network.
  std::vector<int> hidden = {128};
  double epsilon = 0.1;
  double gamma = 1.0;
  int target_sync_steps = 256;
};

/// DQN-style action-value learner: online network, periodically synced target
/// network and an RMSProp optimiser.
struct QAgent {
  nn::Mlp q_net;
  nn::Mlp target_net;
  nn::RmsPropState opt;
  double epsilon = 0.1;
  double gamma = 1.0;
  int target_sync_steps = 256;

  QAgent(const QAgentOptions& options, Rng& rng);
  /// Copies the online parameters into the target network.
  void sync_target();
};

/// Index of the largest entry of each row; ties go to the lowest index.
std::vector<int> greedy_actions(const Matrix& values);

/// With probability epsilon a uniform action, otherwise the greedy one.
envs::Action epsilon_greedy(const QAgent& agent, const envs::Observation& s, Rng& rng);

/// r for terminal transitions, r + gamma * max_a target(s', a) otherwise.
Vector dqn_target(const TransitionBatch& batch, const QAgent& agent);

/// One RMSProp step on mean squared error between q(s)[a] and targets. Only the
/// taken action's output receives gradient. Returns the pre-step loss.
double q_regression_step(QAgent& agent, const Matrix& s, const std::vector<int>& actions, const Vector& targets,
                         double lr);

double dqn_update(QAgent& agent, const TransitionBatch& batch, double lr);

}  // namespace smve::planning
