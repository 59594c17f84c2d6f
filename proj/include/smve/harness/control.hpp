#pragma once

#include <cstdint>
#include <memory>

#include "smve/harness/curve_log.hpp"
#include "smve/uncertainty/dynamics.hpp"

namespace smve::harness {

/// Builds the dynamics model a control or correlation configuration asks for;
/// null for DQN control runs.
std::unique_ptr<uncertainty::DynamicsModel> make_dynamics_model(const ExperimentConfig& config, Rng& rng);

/// Runs one agent on Acrobot for config.total_steps environment steps and logs
/// every config.log_every steps. Correlation configurations additionally
/// log variance/error correlations. Deterministic per (config, seed).
CurveLog run_control(const ExperimentConfig& config, std::uint64_t seed);

/// run_control for a correlation configuration.
CurveLog run_correlation(const ExperimentConfig& config, std::uint64_t seed);

}  // namespace smve::harness
