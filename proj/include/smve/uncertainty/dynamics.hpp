#pragma once

#include <memory>
#include <span>
#include <vector>

#include "smve/envs/acrobot.hpp"
#include "smve/uncertainty/ensemble.hpp"
#include "smve/uncertainty/models.hpp"

namespace smve::uncertainty {

/// Observation concatenated with a one-hot action encoding.
Matrix encode_model_input(const Matrix& obs, std::span<const int> actions);

/// Learned (or oracle) model of the expected next Acrobot observation.
class DynamicsModel {
 public:
  virtual ~DynamicsModel() = default;

  /// Predictive distribution of the next observation for every (row, action).
  virtual Prediction predict(const Matrix& obs, std::span<const int> actions) const = 0;
  /// One training step toward observed successors; returns the pre-step loss.
  virtual double update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs,
                        double lr) = 0;
};

/// Single hidden layer model trained with squared error.
class DeterministicDynamics final : public DynamicsModel {
 public:
  DeterministicDynamics(int hidden_units, Rng& rng);
  Prediction predict(const Matrix& obs, std::span<const int> actions) const override;
  double update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs, double lr) override;
  const DeterministicModel& model() const { return model_; }

 private:
  DeterministicModel model_;
};

/// Heteroscedastic model; variance network has the same layout as the mean network.
class HeteroDynamics final : public DynamicsModel {
 public:
  HeteroDynamics(int hidden_units, Rng& rng);
  Prediction predict(const Matrix& obs, std::span<const int> actions) const override;
  double update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs, double lr) override;
  const HeteroModel& model() const { return model_; }
  HeteroModel& model() { return model_; }

 private:
  HeteroModel model_;
};

/// Which scalar uncertainty an ensemble reports from predict().
enum class EnsembleSignal { kEnsemble, kLearned, kCombined };

class EnsembleDynamics final : public DynamicsModel {
 public:
  EnsembleDynamics(int members, int hidden_units, bool heteroscedastic, EnsembleSignal signal, Rng& rng);
  Prediction predict(const Matrix& obs, std::span<const int> actions) const override;
  double update(const Matrix& obs, std::span<const int> actions, const Matrix& next_obs, double lr) override;

  EnsembleModel::VarianceBreakdown breakdown(const Matrix& obs, std::span<const int> actions) const;
  const EnsembleModel& ensemble() const { return ensemble_; }

 private:
  EnsembleModel ensemble_;
  EnsembleSignal signal_;
};

/// The real Acrobot dynamics behind the model interface. Zero variance, no learning.
class TrueDynamics final : public DynamicsModel {
 public:
  Prediction predict(const Matrix& obs, std::span<const int> actions) const override;
  double update(const Matrix&, std::span<const int>, const Matrix&, double) override { return 0.0; }
};

}  // namespace smve::uncertainty
