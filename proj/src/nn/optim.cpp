#include "smve/nn/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smve::nn {

namespace {

void check_grads(const Mlp& net, const MlpGradients& grads) {
  if (grads.weights.size() != net.weights.size() || grads.biases.size() != net.biases.size()) {
    throw std::invalid_argument("optimizer: gradient layer count mismatch");
  }
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    if (grads.weights[l].rows() != net.weights[l].rows() ||
        grads.weights[l].cols() != net.weights[l].cols() ||
        grads.biases[l].size() != net.biases[l].size()) {
      throw std::invalid_argument("optimizer: gradient shape mismatch at layer " + std::to_string(l));
    }
  }
}

template <typename T>
void ensure_like(std::vector<T>& acc, const std::vector<T>& params) {
  if (acc.empty()) {
    for (const auto& p : params) acc.push_back(T::Zero(p.rows(), p.cols()));
    return;
  }
  if (acc.size() != params.size()) throw std::invalid_argument("optimizer: state does not match network");
  for (std::size_t l = 0; l < params.size(); ++l) {
    if (acc[l].rows() != params[l].rows() || acc[l].cols() != params[l].cols()) {
      throw std::invalid_argument("optimizer: state does not match network");
    }
  }
}

template <typename P, typename G>
void adam_update(P& param, const G& grad, P& m, P& v, const AdamState& s, double step) {
  m = s.beta1 * m + (1.0 - s.beta1) * grad;
  v = s.beta2 * v + (1.0 - s.beta2) * grad.cwiseProduct(grad);
  const double c1 = 1.0 - std::pow(s.beta1, static_cast<double>(s.t));
  const double c2 = 1.0 - std::pow(s.beta2, static_cast<double>(s.t));
  param.array() -= step * (m.array() / c1) / ((v.array() / c2).sqrt() + s.eps);
}

template <typename P, typename G>
void rmsprop_update(P& param, const G& grad, P& v, const RmsPropState& s, double lr) {
  v = s.decay * v + (1.0 - s.decay) * grad.cwiseProduct(grad);
  param.array() -= lr * grad.array() / (v.array().sqrt() + s.eps);
}

}  // namespace

void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state, double lr) {
  check_grads(net, grads);
  ensure_like(state.m_weights, net.weights);
  ensure_like(state.v_weights, net.weights);
  ensure_like(state.m_biases, net.biases);
  ensure_like(state.v_biases, net.biases);
  ++state.t;
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    adam_update(net.weights[l], grads.weights[l], state.m_weights[l], state.v_weights[l], state, lr);
    adam_update(net.biases[l], grads.biases[l], state.m_biases[l], state.v_biases[l], state, lr);
  }
  ++net.revision;
}

void rmsprop_step(Mlp& net, const MlpGradients& grads, RmsPropState& state, double lr) {
  check_grads(net, grads);
  ensure_like(state.v_weights, net.weights);
  ensure_like(state.v_biases, net.biases);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    rmsprop_update(net.weights[l], grads.weights[l], state.v_weights[l], state, lr);
    rmsprop_update(net.biases[l], grads.biases[l], state.v_biases[l], state, lr);
  }
  ++net.revision;
}

}  // namespace smve::nn
