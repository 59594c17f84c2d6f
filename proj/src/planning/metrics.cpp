#include "smve/planning/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smve::planning {

Correlation pearson(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pearson: length mismatch");
  if (x.size() < 2) return {0.0, true};
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  if (!(sxx > 0.0) || !(syy > 0.0)) return {0.0, true};
  const double r = (dx * dy).sum() / std::sqrt(sxx * syy);
  return {std::clamp(r, -1.0, 1.0), false};
}

EstimatorCorrelations variance_error_correlation(const uncertainty::EnsembleDynamics& model,
                                                 const ReplayBuffer& buffer, int batch_size, Rng& rng) {
  if (batch_size < 2) throw std::invalid_argument("correlation batch must hold at least two transitions");
  if (buffer.size() < batch_size) throw std::invalid_argument("replay buffer smaller than correlation batch");
  const TransitionBatch batch = buffer.sample(batch_size, rng);
  const auto parts = model.breakdown(batch.s, batch.a);
  const Vector err = (parts.mean - batch.s_next).rowwise().squaredNorm();
  return {pearson(parts.learned, err), pearson(parts.ensemble, err), pearson(parts.combined, err)};
}

}  // namespace smve::planning
