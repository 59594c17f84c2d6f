#include "smve/uncertainty/ensemble.hpp"

#include <string>

namespace smve::uncertainty {

namespace {

void check_members(const std::vector<Prediction>& members) {
  if (members.empty()) throw std::invalid_argument("ensemble needs at least one member");
  for (const auto& m : members) {
    if (m.mean.rows() != members.front().mean.rows() || m.mean.cols() != members.front().mean.cols()) {
      throw std::invalid_argument("ensemble members disagree on prediction shape");
    }
  }
}

Matrix member_mean(const std::vector<Prediction>& members) {
  Matrix mean = Matrix::Zero(members.front().mean.rows(), members.front().mean.cols());
  for (const auto& m : members) mean += m.mean;
  return mean / static_cast<double>(members.size());
}

}  // namespace

Prediction ensemble_aggregate(const std::vector<Prediction>& members) {
  check_members(members);
  Prediction p;
  p.mean = member_mean(members);
  p.var = Matrix::Zero(p.mean.rows(), p.mean.cols());
  for (const auto& m : members) p.var.array() += (m.mean - p.mean).array().square();
  p.var /= static_cast<double>(members.size());
  p.scalar_var = trace_rows(p.var);
  return p;
}

Prediction mixture_aggregate(const std::vector<Prediction>& members) {
  check_members(members);
  // mean_k(var_k + mu_k^2) - mean^2, rearranged as mean_k(var_k) + mean_k((mu_k - mean)^2)
  // so the result cannot go negative through cancellation.
  Prediction p = ensemble_aggregate(members);
  for (const auto& m : members) {
    if (m.var.rows() != m.mean.rows() || m.var.cols() != m.mean.cols()) {
      throw std::invalid_argument("mixture_aggregate: member without per-dimension variance");
    }
  }
  Matrix avg_var = Matrix::Zero(p.mean.rows(), p.mean.cols());
  for (const auto& m : members) avg_var += m.var;
  avg_var /= static_cast<double>(members.size());
  p.var += avg_var;
  p.scalar_var = trace_rows(p.var);
  return p;
}

EnsembleModel::EnsembleModel(const EnsembleOptions& options, Rng& rng) : options_(options) {
  if (options.members < 1) throw std::invalid_argument("ensemble size must be at least 1");
  if (options.mean_sizes.size() < 2) throw std::invalid_argument("ensemble member layout is empty");
  for (int k = 0; k < options.members; ++k) {
    Rng member_rng = rng.split("member-" + std::to_string(k));
    if (heteroscedastic()) {
      members_.emplace_back(HeteroModel(options.mean_sizes, options.var_sizes, member_rng, options.form));
    } else {
      members_.emplace_back(DeterministicModel(options.mean_sizes, member_rng));
    }
    if (options.priors) {
      Rng prior_rng = rng.split("prior-" + std::to_string(k));
      priors_.push_back(nn::Mlp::glorot(options.mean_sizes, prior_rng));
    }
  }
}

const nn::Mlp* EnsembleModel::prior(int k) const {
  if (priors_.empty()) return nullptr;
  return &priors_.at(k);
}

Prediction EnsembleModel::member_prediction(int k, const Matrix& x) const {
  Prediction p = std::visit([&](const auto& m) { return m.predict(x); }, members_.at(k));
  if (!priors_.empty()) p.mean += options_.prior_scale * nn::predict(priors_[k], x);
  return p;
}

std::vector<Prediction> EnsembleModel::member_predictions(const Matrix& x) const {
  std::vector<Prediction> out;
  out.reserve(members_.size());
  for (int k = 0; k < size(); ++k) out.push_back(member_prediction(k, x));
  return out;
}

Prediction EnsembleModel::predict(const Matrix& x) const { return ensemble_aggregate(member_predictions(x)); }

Prediction EnsembleModel::combined_predict(const Matrix& x) const {
  if (!heteroscedastic()) throw std::invalid_argument("combined_predict requires heteroscedastic members");
  return mixture_aggregate(member_predictions(x));
}

EnsembleModel::VarianceBreakdown EnsembleModel::variance_breakdown(const Matrix& x) const {
  if (!heteroscedastic()) throw std::invalid_argument("variance_breakdown requires heteroscedastic members");
  const std::vector<Prediction> preds = member_predictions(x);
  const Prediction disagreement = ensemble_aggregate(preds);
  VarianceBreakdown out;
  out.mean = disagreement.mean;
  out.ensemble = disagreement.scalar_var;
  out.learned = Vector::Zero(x.rows());
  for (const auto& p : preds) out.learned += p.scalar_var;
  out.learned /= static_cast<double>(preds.size());
  out.combined = mixture_aggregate(preds).scalar_var;
  return out;
}

double EnsembleModel::update_member(int k, const Matrix& x, const Matrix& y, double lr) {
  Matrix offset;
  const Matrix* offset_ptr = nullptr;
  if (!priors_.empty()) {
    offset = options_.prior_scale * nn::predict(priors_.at(k), x);
    offset_ptr = &offset;
  }
  return std::visit([&](auto& m) { return m.update(x, y, lr, offset_ptr); }, members_.at(k));
}

double EnsembleModel::update(const Matrix& x, const Matrix& y, double lr) {
  double total = 0.0;
  for (int k = 0; k < size(); ++k) total += update_member(k, x, y, lr);
  return total / static_cast<double>(size());
}

std::vector<std::vector<int>> bootstrap_indices(int n, int k, Rng& rng) {
  if (n < 1) throw std::invalid_argument("bootstrap: empty data");
  if (k < 1) throw std::invalid_argument("bootstrap: need at least one resample");
  std::vector<std::vector<int>> out(k);
  for (auto& idx : out) {
    idx.resize(n);
    for (int& i : idx) i = rng.index(n);
  }
  return out;
}

}  // namespace smve::uncertainty
