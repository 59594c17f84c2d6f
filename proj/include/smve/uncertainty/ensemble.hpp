#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "smve/uncertainty/models.hpp"

namespace smve::uncertainty {

struct EnsembleOptions {
  int members = 5;
  /// Hidden/output layout of each member's mean network.
  std::vector<int> mean_sizes;
  /// Variance network layout; a non-empty value makes every member heteroscedastic.
  std::vector<int> var_sizes;
  /// Adds a frozen, randomly initialised prior network to every member.
  bool priors = false;
  double prior_scale = 1.0;
  nn::NllForm form = nn::NllForm::kFull;
};

/// Equal-weight aggregate of member predictions: mean of member means and
/// population (divide-by-K) variance of member means per dimension.
Prediction ensemble_aggregate(const std::vector<Prediction>& members);

/// Uniform mixture of per-member diagonal Gaussians, moment-matched per
/// dimension: var = mean_k(var_k + mu_k^2) - mean_k(mu_k)^2.
Prediction mixture_aggregate(const std::vector<Prediction>& members);

/// K independently initialised members whose disagreement estimates parameter
/// uncertainty. Members may carry randomized prior functions.
class EnsembleModel {
 public:
  using Member = std::variant<DeterministicModel, HeteroModel>;

  EnsembleModel(const EnsembleOptions& options, Rng& rng);

  int size() const { return static_cast<int>(members_.size()); }
  bool heteroscedastic() const { return !options_.var_sizes.empty(); }
  const EnsembleOptions& options() const { return options_; }

  /// Member k's prediction; the mean includes prior_scale * prior(x) when priors are on.
  Prediction member_prediction(int k, const Matrix& x) const;
  std::vector<Prediction> member_predictions(const Matrix& x) const;

  /// Mean of member means with ensemble (disagreement) variance.
  Prediction predict(const Matrix& x) const;
  /// Mixture mean and variance; requires heteroscedastic members.
  Prediction combined_predict(const Matrix& x) const;

  /// The three scalar uncertainty signals of a heteroscedastic ensemble.
  /// combined = learned + ensemble holds exactly for the mixture.
  struct VarianceBreakdown {
    Matrix mean;
    Vector learned;   ///< average member trace variance
    Vector ensemble;  ///< trace of the variance of member means
    Vector combined;  ///< trace of the mixture variance
  };
  VarianceBreakdown variance_breakdown(const Matrix& x) const;

  /// Trains every member on the same batch; returns the mean pre-step loss.
  double update(const Matrix& x, const Matrix& y, double lr);
  double update_member(int k, const Matrix& x, const Matrix& y, double lr);

  const Member& member(int k) const { return members_.at(k); }
  Member& member(int k) { return members_.at(k); }
  const nn::Mlp* prior(int k) const;

 private:
  EnsembleOptions options_;
  std::vector<Member> members_;
  std::vector<nn::Mlp> priors_;
};

/// K index lists of length n drawn with replacement from [0, n).
std::vector<std::vector<int>> bootstrap_indices(int n, int k, Rng& rng);

/// K resampled copies of data, each the original length, drawn with replacement.
template <typename T>
std::vector<std::vector<T>> bootstrap_datasets(std::span<const T> data, int k, Rng& rng) {
  if (data.empty()) throw std::invalid_argument("bootstrap_datasets: empty data");
  std::vector<std::vector<T>> out;
  for (const auto& idx : bootstrap_indices(static_cast<int>(data.size()), k, rng)) {
    std::vector<T> sample;
    sample.reserve(idx.size());
    for (int i : idx) sample.push_back(data[i]);
    out.push_back(std::move(sample));
  }
  return out;
}

}  // namespace smve::uncertainty
