#pragma once

#include "smve/planning/replay.hpp"
#include "smve/uncertainty/dynamics.hpp"

namespace smve::planning {

struct Correlation {
  double r = 0.0;
  /// Set when either input is constant; r is then reported as 0.
  bool degenerate = false;
};

Correlation pearson(const Vector& x, const Vector& y);

struct EstimatorCorrelations {
  Correlation learned;
  Correlation ensemble;
  Correlation combined;
};

/// Samples batch_size transitions and correlates each variance estimate of a
/// heteroscedastic ensemble with the true squared error of its mean prediction.
EstimatorCorrelations variance_error_correlation(const uncertainty::EnsembleDynamics& model,
                                                 const ReplayBuffer& buffer, int batch_size, Rng& rng);

}  // namespace smve::planning
