#include "smve/uncertainty/models.hpp"

#include <stdexcept>

namespace smve::uncertainty {

namespace {

void check_batch(const Matrix& x, const Matrix& y) {
  if (x.rows() == 0) throw std::invalid_argument("model update: empty batch");
  if (x.rows() != y.rows()) throw std::invalid_argument("model update: input/target row mismatch");
}

}  // namespace

Vector trace_rows(const Matrix& var) { return var.rowwise().sum(); }

DeterministicModel::DeterministicModel(std::vector<int> layer_sizes, Rng& rng)
    : net_(nn::Mlp::glorot(std::move(layer_sizes), rng)) {}

Prediction DeterministicModel::predict(const Matrix& x) const {
  Prediction p;
  p.mean = nn::predict(net_, x);
  p.var = Matrix::Zero(p.mean.rows(), p.mean.cols());
  p.scalar_var = Vector::Zero(p.mean.rows());
  return p;
}

double DeterministicModel::update(const Matrix& x, const Matrix& y, double lr, const Matrix* offset) {
  check_batch(x, y);
  nn::ForwardResult fw = nn::forward(net_, x);
  if (offset) fw.output += *offset;
  const nn::LossAndGrad loss = nn::mse_loss(fw.output, y);
  const nn::MlpGradients grads = nn::backward(net_, fw.cache, loss.grad);
  nn::adam_step(net_, grads, opt_, lr);
  return loss.loss;
}

HeteroModel::HeteroModel(std::vector<int> mean_sizes, std::vector<int> var_sizes, Rng& rng, nn::NllForm form)
    : mean_net_(nn::Mlp::glorot(std::move(mean_sizes), rng)),
      var_net_(nn::Mlp::glorot(std::move(var_sizes), rng)),
      form_(form) {
  if (mean_net_.input_size() != var_net_.input_size() || mean_net_.output_size() != var_net_.output_size()) {
    throw std::invalid_argument("HeteroModel: mean and variance networks must share input/output sizes");
  }
}

Prediction HeteroModel::predict(const Matrix& x) const {
  Prediction p;
  p.mean = nn::predict(mean_net_, x);
  p.var = nn::softplus_floor(nn::predict(var_net_, x));
  p.scalar_var = trace_rows(p.var);
  return p;
}

HeteroModel::Gradients HeteroModel::loss_and_gradients(const Matrix& x, const Matrix& y,
                                                       const Matrix* offset) const {
  check_batch(x, y);
  nn::ForwardResult mean_fw = nn::forward(mean_net_, x);
  if (offset) mean_fw.output += *offset;
  const nn::ForwardResult var_fw = nn::forward(var_net_, x);
  const Matrix var = nn::softplus_floor(var_fw.output);
  const nn::BatchNll nll = nn::gaussian_nll_batch(mean_fw.output, var, y, form_);
  const Matrix d_pre = nll.d_var.cwiseProduct(nn::softplus_grad(var_fw.output));
  Gradients g;
  g.loss = nll.loss;
  g.mean = nn::backward(mean_net_, mean_fw.cache, nll.d_mu);
  g.var = nn::backward(var_net_, var_fw.cache, d_pre);
  return g;
}

double HeteroModel::update(const Matrix& x, const Matrix& y, double lr, const Matrix* offset) {
  const Gradients g = loss_and_gradients(x, y, offset);
  nn::adam_step(mean_net_, g.mean, mean_opt_, lr);
  nn::adam_step(var_net_, g.var, var_opt_, lr);
  return g.loss;
}

}  // namespace smve::uncertainty
