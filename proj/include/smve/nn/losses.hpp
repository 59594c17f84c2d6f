#pragma once

#include "smve/nn/types.hpp"

namespace smve::nn {

/// Added to every softplus output so predicted variances never reach zero.
inline constexpr double kVarianceFloor = 1e-6;

struct LossAndGrad {
  double loss = 0.0;
  Matrix grad;
};

/// Mean over all entries of (pred - target)^2.
LossAndGrad mse_loss(const Matrix& pred, const Matrix& target);

struct ScalarNll {
  double loss = 0.0;
  double d_mu = 0.0;
  double d_var = 0.0;
};

/// Gaussian negative log-likelihood of one scalar target, up to a constant:
/// (y - mu)^2 / (2 var) + log(var) / 2.
ScalarNll hetero_nll_1d(double y, double mu, double var);

struct VectorNll {
  double loss = 0.0;
  Vector d_mu;
  Vector d_var;
};

/// Mahalanobis term plus log-determinant for a diagonal covariance:
/// sum_d (mu_d - t_d)^2 / var_d + sum_d log var_d.
VectorNll diag_gaussian_nll(const Vector& mu, const Vector& var, const Vector& target);

/// Selects between the two scalings of the Gaussian likelihood. kHalf is the
/// per-dimension form of hetero_nll_1d, kFull is diag_gaussian_nll (twice kHalf).
enum class NllForm { kHalf, kFull };

struct BatchNll {
  double loss = 0.0;
  Matrix d_mu;
  Matrix d_var;
};

/// Batched likelihood loss, summed over dimensions and averaged over rows.
BatchNll gaussian_nll_batch(const Matrix& mu, const Matrix& var, const Matrix& target,
                            NllForm form);

/// log(1 + exp(z)) + kVarianceFloor, elementwise and overflow-safe.
Matrix softplus_floor(const Matrix& z);
/// d softplus_floor / dz, i.e. the logistic sigmoid.
Matrix softplus_grad(const Matrix& z);

double softplus_floor(double z);

}  // namespace smve::nn
