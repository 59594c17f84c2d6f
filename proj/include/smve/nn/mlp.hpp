#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "smve/nn/types.hpp"
#include "smve/rng.hpp"

namespace smve::nn {

/// Uniform Glorot initialisation: entries in [-L, L], L = sqrt(6 / (fan_in + fan_out)).
Matrix glorot_init(int fan_in, int fan_out, Rng& rng);

/// Fully connected network with ReLU hidden layers and a linear output layer.
///
/// weights[l] is (layer_sizes[l] x layer_sizes[l+1]) so that a batch X of shape
/// (B x layer_sizes[0]) maps through X * W + b.
struct Mlp {
  std::vector<int> layer_sizes;
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  /// Bumped by every optimiser step; forward caches remember it.
  std::uint64_t revision = 0;

  Mlp() = default;
  /// All-zero parameters.
  explicit Mlp(std::vector<int> sizes);
  /// Glorot weights, zero biases.
  static Mlp glorot(std::vector<int> sizes, Rng& rng);

  int num_layers() const { return static_cast<int>(weights.size()); }
  int input_size() const { return layer_sizes.front(); }
  int output_size() const { return layer_sizes.back(); }
  std::size_t parameter_count() const;
};

/// Inverted dropout on hidden units: each unit is zeroed with probability p and
/// survivors are scaled by 1 / (1 - p).
struct DropoutSpec {
  double p = 0.0;
};

struct ForwardCache {
  std::vector<int> layer_sizes;
  std::uint64_t revision = 0;
  const Mlp* net = nullptr;
  /// Input fed into each layer (the batch itself for layer 0).
  std::vector<Matrix> layer_inputs;
  /// Pre-activations of hidden layers.
  std::vector<Matrix> hidden_pre;
  /// Dropout masks of hidden layers (already scaled); empty without dropout.
  std::vector<Matrix> masks;
};

struct ForwardResult {
  Matrix output;
  ForwardCache cache;
};

struct MlpGradients {
  std::vector<Matrix> weights;
  std::vector<RowVector> biases;
  /// dL/dx for the batch that went through forward.
  Matrix input;

  static MlpGradients zeros_like(const Mlp& net);
  MlpGradients& operator+=(const MlpGradients& other);
};

ForwardResult forward(const Mlp& net, const Matrix& x,
                      std::optional<DropoutSpec> dropout = std::nullopt,
                      Rng* rng = nullptr);

/// Forward pass without a cache, for inference-only callers.
Matrix predict(const Mlp& net, const Matrix& x);

MlpGradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& dloss_dout);

}  // namespace smve::nn
