#include "smve/uncertainty/dynamics.hpp"

#include <stdexcept>

namespace smve::uncertainty {

namespace {

constexpr int kInputSize = envs::kObservationSize + envs::kNumActions;

std::vector<int> layout(int hidden_units) {
  if (hidden_units < 1) throw std::invalid_argument("dynamics model needs at least one hidden unit");
  return {kInputSize, hidden_units, envs::kObservationSize};
}

}  // namespace

Matrix encode_model_input(const Matrix& obs, std::span<const int> actions) {
  if (obs.cols() != envs::kObservationSize) throw std::invalid_argument("encode_model_input: bad observation width");
  if (static_cast<std::size_t>(obs.rows()) != actions.size()) {
    throw std::invalid_argument("encode_model_input: one action per observation required");
  }
  Matrix x = Matrix::Zero(obs.rows(), kInputSize);
  x.leftCols(envs::kObservationSize) = obs;
  for (Eigen::Index i = 0; i < obs.rows(); ++i) {
    const int a = actions[i];
    if (a < 0 || a >= envs::kNumActions) throw std::invalid_argument("encode_model_input: action out of range");
    x(i, envs::kObservationSize + a) = 1.0;
  }
  return x;
}

DeterministicDynamics::DeterministicDynamics(int hidden_units, Rng& rng) : model_(layout(hidden_units), rng) {}

Prediction DeterministicDynamics::predict(const Matrix& obs, std::span<const int> actions) const {
  return model_.predict(encode_model_input(obs, actions));
}

double DeterministicDynamics::update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs,
                                     double lr) {
  return model_.update(encode_model_input(obs, actions), next_obs, lr);
}

HeteroDynamics::HeteroDynamics(int hidden_units, Rng& rng)
    : model_(layout(hidden_units), layout(hidden_units), rng, nn::NllForm::kFull) {}

Prediction HeteroDynamics::predict(const Matrix& obs, std::span<const int> actions) const {
  return model_.predict(encode_model_input(obs, actions));
}

double HeteroDynamics::update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs, double lr) {
  return model_.update(encode_model_input(obs, actions), next_obs, lr);
}

namespace {

EnsembleOptions ensemble_options(int members, int hidden_units, bool heteroscedastic) {
  EnsembleOptions o;
  o.members = members;
  o.mean_sizes = layout(hidden_units);
  if (heteroscedastic) o.var_sizes = layout(hidden_units);
  return o;
}

}  // namespace

EnsembleDynamics::EnsembleDynamics(int members, int hidden_units, bool heteroscedastic, EnsembleSignal signal,
                                   Rng& rng)
    : ensemble_(ensemble_options(members, hidden_units, heteroscedastic), rng), signal_(signal) {
  if (signal != EnsembleSignal::kEnsemble && !heteroscedastic) {
    throw std::invalid_argument("learned and combined signals need heteroscedastic members");
  }
}

Prediction EnsembleDynamics::predict(const Matrix& obs, std::span<const int> actions) const {
  const Matrix x = encode_model_input(obs, actions);
  switch (signal_) {
    case EnsembleSignal::kEnsemble:
      return ensemble_.predict(x);
    case EnsembleSignal::kCombined:
      return ensemble_.combined_predict(x);
    case EnsembleSignal::kLearned: {
      const std::vector<Prediction> preds = ensemble_.member_predictions(x);
      Prediction p = ensemble_aggregate(preds);
      p.var.setZero();
      for (const auto& m : preds) p.var += m.var;
      p.var /= static_cast<double>(preds.size());
      p.scalar_var = trace_rows(p.var);
      return p;
    }
  }
  throw std::logic_error("unknown ensemble signal");
}

double EnsembleDynamics::update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs,
                                double lr) {
  return ensemble_.update(encode_model_input(obs, actions), next_obs, lr);
}

EnsembleModel::VarianceBreakdown EnsembleDynamics::breakdown(const Matrix& obs, std::span<const int> actions) const {
  return ensemble_.variance_breakdown(encode_model_input(obs, actions));
}

Prediction TrueDynamics::predict(const Matrix& obs, std::span<const int> actions) const {
  if (obs.cols() != envs::kObservationSize || static_cast<std::size_t>(obs.rows()) != actions.size()) {
    throw std::invalid_argument("TrueDynamics: bad batch shape");
  }
  Prediction p;
  p.mean.resize(obs.rows(), envs::kObservationSize);
  for (Eigen::Index i = 0; i < obs.rows(); ++i) {
    const envs::Observation o = obs.row(i);
    p.mean.row(i) = envs::true_next_observation(o, actions[i]);
  }
  p.var = Matrix::Zero(obs.rows(), envs::kObservationSize);
  p.scalar_var = Vector::Zero(obs.rows());
  return p;
}

}  // namespace smve::uncertainty
