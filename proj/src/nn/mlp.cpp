#include "smve/nn/mlp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smve::nn {

namespace {

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp needs at least an input and an output layer");
  for (int s : sizes) {
    if (s < 1) throw std::invalid_argument("Mlp layer sizes must be positive");
  }
}

void check_input(const Mlp& net, const Matrix& x) {
  if (net.weights.empty()) throw std::invalid_argument("forward on an empty Mlp");
  if (x.cols() != net.input_size()) {
    throw std::invalid_argument("forward: input has " + std::to_string(x.cols()) +
                                " columns, network expects " + std::to_string(net.input_size()));
  }
}

}  // namespace

Matrix glorot_init(int fan_in, int fan_out, Rng& rng) {
  if (fan_in < 1 || fan_out < 1) throw std::invalid_argument("glorot_init: dimensions must be positive");
  const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Matrix w(fan_in, fan_out);
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = rng.uniform(-limit, limit);
  }
  return w;
}

Mlp::Mlp(std::vector<int> sizes) : layer_sizes(std::move(sizes)) {
  check_sizes(layer_sizes);
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    weights.push_back(Matrix::Zero(layer_sizes[l], layer_sizes[l + 1]));
    biases.push_back(RowVector::Zero(layer_sizes[l + 1]));
  }
}

Mlp Mlp::glorot(std::vector<int> sizes, Rng& rng) {
  Mlp net(std::move(sizes));
  for (int l = 0; l < net.num_layers(); ++l) {
    net.weights[l] = glorot_init(net.layer_sizes[l], net.layer_sizes[l + 1], rng);
  }
  return net;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (int l = 0; l < num_layers(); ++l) n += weights[l].size() + biases[l].size();
  return n;
}

MlpGradients MlpGradients::zeros_like(const Mlp& net) {
  MlpGradients g;
  for (int l = 0; l < net.num_layers(); ++l) {
    g.weights.push_back(Matrix::Zero(net.weights[l].rows(), net.weights[l].cols()));
    g.biases.push_back(RowVector::Zero(net.biases[l].size()));
  }
  return g;
}

MlpGradients& MlpGradients::operator+=(const MlpGradients& other) {
  if (other.weights.size() != weights.size()) throw std::invalid_argument("gradient layer count mismatch");
  for (std::size_t l = 0; l < weights.size(); ++l) {
    weights[l] += other.weights[l];
    biases[l] += other.biases[l];
  }
  return *this;
}

ForwardResult forward(const Mlp& net, const Matrix& x, std::optional<DropoutSpec> dropout, Rng* rng) {
  check_input(net, x);
  const bool use_dropout = dropout.has_value() && dropout->p > 0.0;
  if (dropout && (dropout->p < 0.0 || dropout->p >= 1.0)) {
    throw std::invalid_argument("dropout probability must lie in [0, 1)");
  }
  if (use_dropout && rng == nullptr) throw std::invalid_argument("dropout requires a random source");

  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.layer_sizes = net.layer_sizes;
  cache.revision = net.revision;
  cache.net = &net;
  cache.layer_inputs.reserve(net.num_layers());

  Matrix h = x;
  const int last = net.num_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Matrix z = h * net.weights[l];
    z.rowwise() += net.biases[l];
    cache.layer_inputs.push_back(std::move(h));
    if (l == last) {
      result.output = std::move(z);
      break;
    }
    h = z.cwiseMax(0.0);
    cache.hidden_pre.push_back(std::move(z));
    if (use_dropout) {
      const double keep_scale = 1.0 / (1.0 - dropout->p);
      Matrix mask(h.rows(), h.cols());
      for (Eigen::Index i = 0; i < mask.size(); ++i) {
        mask.data()[i] = rng->bernoulli(dropout->p) ? 0.0 : keep_scale;
      }
      h = h.cwiseProduct(mask);
      cache.masks.push_back(std::move(mask));
    }
  }
  return result;
}

Matrix predict(const Mlp& net, const Matrix& x) {
  check_input(net, x);
  Matrix h = x;
  const int last = net.num_layers() - 1;
  for (int l = 0; l <= last; ++l) {
    Matrix z = h * net.weights[l];
    z.rowwise() += net.biases[l];
    if (l == last) return z;
    h = z.cwiseMax(0.0);
  }
  return h;
}

MlpGradients backward(const Mlp& net, const ForwardCache& cache, const Matrix& dloss_dout) {
  if (cache.net != &net || cache.layer_sizes != net.layer_sizes || cache.revision != net.revision) {
    throw std::invalid_argument("backward: cache does not belong to the current network state");
  }
  const int layers = net.num_layers();
  if (static_cast<int>(cache.layer_inputs.size()) != layers) {
    throw std::invalid_argument("backward: incomplete forward cache");
  }
  const Eigen::Index batch = cache.layer_inputs.front().rows();
  if (dloss_dout.rows() != batch || dloss_dout.cols() != net.output_size()) {
    throw std::invalid_argument("backward: upstream gradient shape mismatch");
  }

  MlpGradients grads;
  grads.weights.resize(layers);
  grads.biases.resize(layers);
  Matrix delta = dloss_dout;
  for (int l = layers - 1; l >= 0; --l) {
    grads.weights[l].noalias() = cache.layer_inputs[l].transpose() * delta;
    grads.biases[l] = delta.colwise().sum();
    Matrix upstream = delta * net.weights[l].transpose();
    if (l == 0) {
      grads.input = std::move(upstream);
      break;
    }
    if (!cache.masks.empty()) upstream = upstream.cwiseProduct(cache.masks[l - 1]);
    const Matrix& pre = cache.hidden_pre[l - 1];
    delta = (pre.array() > 0.0).select(upstream, 0.0);
  }
  return grads;
}

}  // namespace smve::nn
