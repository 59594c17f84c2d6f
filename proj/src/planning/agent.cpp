#include "smve/planning/agent.hpp"

#include <stdexcept>

namespace smve::planning {

namespace {

std::vector<int> q_layout(const std::vector<int>& hidden) {
  std::vector<int> sizes{envs::kObservationSize};
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(envs::kNumActions);
  return sizes;
}

}  // namespace

QAgent::QAgent(const QAgentOptions& options, Rng& rng)
    : q_net(nn::Mlp::glorot(q_layout(options.hidden), rng)),
      target_net(q_net),
      epsilon(options.epsilon),
      gamma(options.gamma),
      target_sync_steps(options.target_sync_steps) {
  if (epsilon < 0.0 || epsilon > 1.0) throw std::invalid_argument("epsilon must lie in [0, 1]");
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("gamma must lie in [0, 1]");
  if (target_sync_steps < 1) throw std::invalid_argument("target sync period must be positive");
}

void QAgent::sync_target() {
  target_net.weights = q_net.weights;
  target_net.biases = q_net.biases;
  ++target_net.revision;
}

std::vector<int> greedy_actions(const Matrix& values) {
  std::vector<int> out(values.rows());
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    int best = 0;
    for (Eigen::Index j = 1; j < values.cols(); ++j) {
      if (values(i, j) > values(i, best)) best = static_cast<int>(j);
    }
    out[i] = best;
  }
  return out;
}

envs::Action epsilon_greedy(const QAgent& agent, const envs::Observation& s, Rng& rng) {
  if (agent.epsilon > 0.0 && rng.bernoulli(agent.epsilon)) return rng.index(envs::kNumActions);
  return greedy_actions(nn::predict(agent.q_net, Matrix(s)))[0];
}

Vector dqn_target(const TransitionBatch& batch, const QAgent& agent) {
  if (batch.size() == 0) throw std::invalid_argument("dqn_target: empty batch");
  const Vector next_max = nn::predict(agent.target_net, batch.s_next).rowwise().maxCoeff();
  Vector y(batch.size());
  for (int i = 0; i < batch.size(); ++i) {
    y(i) = batch.terminal[i] ? batch.r(i) : batch.r(i) + agent.gamma * next_max(i);
  }
  return y;
}

double q_regression_step(QAgent& agent, const Matrix& s, const std::vector<int>& actions, const Vector& targets,
                         double lr) {
  const auto n = static_cast<Eigen::Index>(actions.size());
  if (n == 0) throw std::invalid_argument("value update: empty batch");
  if (s.rows() != n || targets.size() != n) throw std::invalid_argument("value update: batch shape mismatch");
  const nn::ForwardResult fw = nn::forward(agent.q_net, s);
  Matrix grad = Matrix::Zero(fw.output.rows(), fw.output.cols());
  double loss = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = fw.output(i, actions[i]) - targets(i);
    loss += err * err;
    grad(i, actions[i]) = 2.0 * err / static_cast<double>(n);
  }
  nn::rmsprop_step(agent.q_net, nn::backward(agent.q_net, fw.cache, grad), agent.opt, lr);
  return loss / static_cast<double>(n);
}

double dqn_update(QAgent& agent, const TransitionBatch& batch, double lr) {
  return q_regression_step(agent, batch.s, batch.a, dqn_target(batch, agent), lr);
}

}  // namespace smve::planning
