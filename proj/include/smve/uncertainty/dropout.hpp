#pragma once

#include <vector>

#include "smve/uncertainty/models.hpp"

namespace smve::uncertainty {

/// Network trained with dropout whose predictive variance comes from repeated
/// stochastic (mask-active) forward passes.
class DropoutModel {
 public:
  DropoutModel(std::vector<int> layer_sizes, Rng& rng, double p = 0.1, int passes = 10);

  /// `passes` stochastic forwards; population mean and variance per dimension.
  Prediction predict(const Matrix& x, Rng& rng) const;
  /// One Adam step on squared error with a fresh dropout mask.
  double update(const Matrix& x, const Matrix& y, double lr, Rng& rng);

  double p() const { return p_; }
  int passes() const { return passes_; }
  const nn::Mlp& net() const { return net_; }

 private:
  nn::Mlp net_;
  nn::AdamState opt_;
  double p_;
  int passes_;
};

}  // namespace smve::uncertainty
