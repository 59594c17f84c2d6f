#pragma once

// Direct evaluations used as references. These deliberately avoid the library
// code paths they are compared against.

#include <cmath>
#include <vector>

#include "smve/rng.hpp"

namespace smve::testing {

// Naive softmax of -c / tau in long double, no max-subtraction.
inline std::vector<double> naive_softmax_weights(const std::vector<double>& cum, double tau) {
  long double total = 0.0L;
  std::vector<long double> e;
  for (double c : cum) {
    e.push_back(std::exp(-static_cast<long double>(c) / tau));
    total += e.back();
  }
  std::vector<double> w;
  for (long double v : e) w.push_back(static_cast<double>(v / total));
  return w;
}

inline double naive_dot(const std::vector<double>& a, const std::vector<double>& b) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long double>(a[i]) * b[i];
  return static_cast<double>(s);
}

inline double naive_rollout_length(const std::vector<double>& w) {
  long double s = 0.0L;
  for (std::size_t h = 0; h < w.size(); ++h) s += static_cast<long double>(h + 1) * w[h];
  return static_cast<double>(s);
}

// Uniform mixture of scalar Gaussians via the raw second moment.
inline double naive_mixture_variance(const std::vector<double>& mu, const std::vector<double>& var) {
  long double m1 = 0.0L, m2 = 0.0L;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    m1 += mu[k];
    m2 += static_cast<long double>(var[k]) + static_cast<long double>(mu[k]) * mu[k];
  }
  m1 /= mu.size();
  m2 /= mu.size();
  return static_cast<double>(m2 - m1 * m1);
}

// Empirical variance of draws: pick a component uniformly, then sample it.
inline double monte_carlo_mixture_variance(const std::vector<double>& mu, const std::vector<double>& var, int draws,
                                           Rng& rng) {
  long double sum = 0.0L, sum_sq = 0.0L;
  for (int i = 0; i < draws; ++i) {
    const int k = rng.index(static_cast<int>(mu.size()));
    const double x = rng.normal(mu[k], std::sqrt(var[k]));
    sum += x;
    sum_sq += static_cast<long double>(x) * x;
  }
  const long double mean = sum / draws;
  return static_cast<double>(sum_sq / draws - mean * mean);
}

inline double scalar_hetero_nll(double y, double mu, double var) {
  return (y - mu) * (y - mu) / (2.0 * var) + 0.5 * std::log(var);
}

}  // namespace smve::testing
