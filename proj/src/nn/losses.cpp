#include "smve/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace smve::nn {

LossAndGrad mse_loss(const Matrix& pred, const Matrix& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  if (pred.size() == 0) throw std::invalid_argument("mse_loss: empty input");
  const double count = static_cast<double>(pred.size());
  Matrix diff = pred - target;
  LossAndGrad out;
  out.loss = diff.squaredNorm() / count;
  out.grad = (2.0 / count) * diff;
  return out;
}

ScalarNll hetero_nll_1d(double y, double mu, double var) {
  if (!(var > 0.0)) throw std::invalid_argument("hetero_nll_1d: variance must be positive");
  const double r = y - mu;
  ScalarNll out;
  out.loss = r * r / (2.0 * var) + 0.5 * std::log(var);
  out.d_mu = -r / var;
  out.d_var = -r * r / (2.0 * var * var) + 0.5 / var;
  return out;
}

VectorNll diag_gaussian_nll(const Vector& mu, const Vector& var, const Vector& target) {
  if (mu.size() != var.size() || mu.size() != target.size()) {
    throw std::invalid_argument("diag_gaussian_nll: length mismatch");
  }
  if ((var.array() <= 0.0).any()) throw std::invalid_argument("diag_gaussian_nll: variance must be positive");
  const Eigen::ArrayXd r = (mu - target).array();
  const Eigen::ArrayXd v = var.array();
  VectorNll out;
  out.loss = (r.square() / v).sum() + v.log().sum();
  out.d_mu = (2.0 * r / v).matrix();
  out.d_var = (-r.square() / v.square() + 1.0 / v).matrix();
  return out;
}

BatchNll gaussian_nll_batch(const Matrix& mu, const Matrix& var, const Matrix& target, NllForm form) {
  if (mu.rows() != var.rows() || mu.cols() != var.cols() || mu.rows() != target.rows() ||
      mu.cols() != target.cols()) {
    throw std::invalid_argument("gaussian_nll_batch: shape mismatch");
  }
  if (mu.rows() == 0) throw std::invalid_argument("gaussian_nll_batch: empty batch");
  if ((var.array() <= 0.0).any()) throw std::invalid_argument("gaussian_nll_batch: variance must be positive");
  const double scale = (form == NllForm::kFull ? 1.0 : 0.5) / static_cast<double>(mu.rows());
  const auto r = (mu - target).array();
  const auto v = var.array();
  BatchNll out;
  out.loss = scale * ((r.square() / v).sum() + v.log().sum());
  out.d_mu = (scale * 2.0 * r / v).matrix();
  out.d_var = (scale * (1.0 / v - r.square() / v.square())).matrix();
  return out;
}

double softplus_floor(double z) {
  // log1p(exp(z)) = max(z, 0) + log1p(exp(-|z|)).
  return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))) + kVarianceFloor;
}

Matrix softplus_floor(const Matrix& z) {
  return z.unaryExpr([](double v) { return softplus_floor(v); });
}

Matrix softplus_grad(const Matrix& z) {
  return z.unaryExpr([](double v) {
    if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
}

}  // namespace smve::nn
