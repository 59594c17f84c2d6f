#include "smve/uncertainty/dropout.hpp"

#include <stdexcept>

namespace smve::uncertainty {

DropoutModel::DropoutModel(std::vector<int> layer_sizes, Rng& rng, double p, int passes)
    : net_(nn::Mlp::glorot(std::move(layer_sizes), rng)), p_(p), passes_(passes) {
  if (p < 0.0 || p >= 1.0) throw std::invalid_argument("DropoutModel: p must lie in [0, 1)");
  if (passes < 1) throw std::invalid_argument("DropoutModel: need at least one pass");
}

Prediction DropoutModel::predict(const Matrix& x, Rng& rng) const {
  const nn::DropoutSpec spec{p_};
  std::vector<Matrix> samples;
  samples.reserve(passes_);
  for (int m = 0; m < passes_; ++m) samples.push_back(nn::forward(net_, x, spec, &rng).output);
  Prediction out;
  out.mean = Matrix::Zero(samples.front().rows(), samples.front().cols());
  for (const auto& s : samples) out.mean += s;
  out.mean /= static_cast<double>(passes_);
  out.var = Matrix::Zero(out.mean.rows(), out.mean.cols());
  for (const auto& s : samples) out.var.array() += (s - out.mean).array().square();
  out.var /= static_cast<double>(passes_);
  out.scalar_var = trace_rows(out.var);
  return out;
}

double DropoutModel::update(const Matrix& x, const Matrix& y, double lr, Rng& rng) {
  if (x.rows() == 0) throw std::invalid_argument("DropoutModel::update: empty batch");
  const nn::ForwardResult fw = nn::forward(net_, x, nn::DropoutSpec{p_}, &rng);
  const nn::LossAndGrad loss = nn::mse_loss(fw.output, y);
  nn::adam_step(net_, nn::backward(net_, fw.cache, loss.grad), opt_, lr);
  return loss.loss;
}

}  // namespace smve::uncertainty
