#pragma once

#include <vector>

#include "smve/nn/losses.hpp"
#include "smve/nn/mlp.hpp"
#include "smve/nn/optim.hpp"

namespace smve::uncertainty {

using nn::Matrix;
using nn::Vector;

/// Predictive distribution for a batch: per-dimension mean and variance, plus
/// the trace of the diagonal covariance per row.
struct Prediction {
  Matrix mean;
  Matrix var;
  Vector scalar_var;
};

/// Row-wise sum of a variance matrix.
Vector trace_rows(const Matrix& var);

/// Point-estimate regressor trained with squared error. Reports zero variance.
class DeterministicModel {
 public:
  DeterministicModel(std::vector<int> layer_sizes, Rng& rng);

  Prediction predict(const Matrix& x) const;
  Matrix predict_mean(const Matrix& x) const { return nn::predict(net_, x); }

  /// One Adam step on mse_loss(net(x) + offset, y); returns the pre-step loss.
  /// offset (optional) is a fixed additive term such as a prior function output.
  double update(const Matrix& x, const Matrix& y, double lr, const Matrix* offset = nullptr);

  const nn::Mlp& net() const { return net_; }
  nn::Mlp& net() { return net_; }

 private:
  nn::Mlp net_;
  nn::AdamState opt_;
};

/// Heteroscedastic regressor: separate mean and variance networks trained
/// jointly by maximum likelihood under a diagonal Gaussian.
class HeteroModel {
 public:
  HeteroModel(std::vector<int> mean_sizes, std::vector<int> var_sizes, Rng& rng,
              nn::NllForm form = nn::NllForm::kFull);

  /// var = softplus_floor(var_net(x)); scalar_var = trace.
  Prediction predict(const Matrix& x) const;
  Matrix predict_mean(const Matrix& x) const { return nn::predict(mean_net_, x); }

  /// One joint Adam step on the batch likelihood loss; returns the pre-step loss.
  double update(const Matrix& x, const Matrix& y, double lr, const Matrix* offset = nullptr);

  /// Loss and gradients without stepping (exposed for gradient checks).
  struct Gradients {
    double loss = 0.0;
    nn::MlpGradients mean;
    nn::MlpGradients var;
  };
  Gradients loss_and_gradients(const Matrix& x, const Matrix& y, const Matrix* offset = nullptr) const;

  nn::NllForm form() const { return form_; }
  const nn::Mlp& mean_net() const { return mean_net_; }
  const nn::Mlp& var_net() const { return var_net_; }
  nn::Mlp& mean_net() { return mean_net_; }
  nn::Mlp& var_net() { return var_net_; }

 private:
  nn::Mlp mean_net_;
  nn::Mlp var_net_;
  nn::AdamState mean_opt_;
  nn::AdamState var_opt_;
  nn::NllForm form_;
};

}  // namespace smve::uncertainty
