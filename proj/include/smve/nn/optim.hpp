#pragma once

#include <cstdint>
#include <vector>

#include "smve/nn/mlp.hpp"

namespace smve::nn {

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::int64_t t = 0;
  std::vector<Matrix> m_weights, v_weights;
  std::vector<RowVector> m_biases, v_biases;
};

struct RmsPropState {
  double decay = 0.99;
  double eps = 1e-8;
  std::vector<Matrix> v_weights;
  std::vector<RowVector> v_biases;
};

/// Bias-corrected Adam step applied to net in place. Accumulators are sized on
/// first use and must keep matching the network afterwards.
void adam_step(Mlp& net, const MlpGradients& grads, AdamState& state, double lr);

/// v <- decay * v + (1 - decay) g^2; param <- param - lr * g / (sqrt(v) + eps).
void rmsprop_step(Mlp& net, const MlpGradients& grads, RmsPropState& state, double lr);

}  // namespace smve::nn
