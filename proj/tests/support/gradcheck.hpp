#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "smve/nn/losses.hpp"
#include "smve/nn/mlp.hpp"
#include "smve/rng.hpp"
#include "smve/uncertainty/models.hpp"

namespace smve::testing {

using nn::Matrix;

// Magnitudes below the floor are compared absolutely; central differences
// cannot resolve them relative to roundoff.
inline double relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

struct GradCheckReport {
  double max_rel = 0.0;
  int checked = 0;
  void merge(const GradCheckReport& o) {
    max_rel = std::max(max_rel, o.max_rel);
    checked += o.checked;
  }
};

// Compares analytic gradients of every parameter of `net` with central
// differences of loss(), which must read `net` afresh on each call.
inline GradCheckReport check_parameters(nn::Mlp& net, const nn::MlpGradients& analytic,
                                        const std::function<double()>& loss, double h = 1e-5) {
  GradCheckReport report;
  auto probe = [&](double& p, double g) {
    const double saved = p;
    p = saved + h;
    const double up = loss();
    p = saved - h;
    const double down = loss();
    p = saved;
    report.max_rel = std::max(report.max_rel, relative_error(g, (up - down) / (2.0 * h)));
    ++report.checked;
  };
  for (int l = 0; l < net.num_layers(); ++l) {
    for (Eigen::Index i = 0; i < net.weights[l].size(); ++i) probe(net.weights[l].data()[i], analytic.weights[l].data()[i]);
    for (Eigen::Index i = 0; i < net.biases[l].size(); ++i) probe(net.biases[l].data()[i], analytic.biases[l].data()[i]);
  }
  return report;
}

inline GradCheckReport check_input(const Matrix& x0, const Matrix& analytic,
                                   const std::function<double(const Matrix&)>& loss, double h = 1e-5) {
  GradCheckReport report;
  Matrix x = x0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double saved = x.data()[i];
    x.data()[i] = saved + h;
    const double up = loss(x);
    x.data()[i] = saved - h;
    const double down = loss(x);
    x.data()[i] = saved;
    report.max_rel = std::max(report.max_rel, relative_error(analytic.data()[i], (up - down) / (2.0 * h)));
    ++report.checked;
  }
  return report;
}

// Small random layout: up to two hidden layers of at most eight units.
inline std::vector<int> random_layout(Rng& rng, int in, int out) {
  std::vector<int> sizes{in};
  const int hidden = rng.index(3);
  for (int i = 0; i < hidden; ++i) sizes.push_back(1 + rng.index(8));
  sizes.push_back(out);
  return sizes;
}

inline nn::Mlp random_net(std::vector<int> sizes, Rng& rng) {
  nn::Mlp net = nn::Mlp::glorot(std::move(sizes), rng);
  for (auto& b : net.biases) {
    for (Eigen::Index i = 0; i < b.size(); ++i) b(i) = rng.uniform(-0.5, 0.5);
  }
  return net;
}

inline Matrix random_matrix(int rows, int cols, Rng& rng, double scale = 1.0) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(-scale, scale);
  return m;
}

// Central differences straddling a ReLU kink are meaningless, so random cases
// keep every hidden pre-activation at least `margin` away from zero.
inline bool kink_free(const nn::Mlp& net, const Matrix& x, double margin = 1e-3) {
  const auto fr = nn::forward(net, x);
  for (const auto& pre : fr.cache.hidden_pre) {
    if ((pre.array().abs() < margin).any()) return false;
  }
  return true;
}

inline Matrix kink_free_input(const std::vector<const nn::Mlp*>& nets, int rows, int cols, Rng& rng) {
  for (;;) {
    Matrix x = random_matrix(rows, cols, rng);
    bool ok = true;
    for (const auto* net : nets) ok = ok && kink_free(*net, x);
    if (ok) return x;
  }
}

inline GradCheckReport check_mse_case(Rng& rng) {
  const int in = 1 + rng.index(4), out = 1 + rng.index(4), batch = 1 + rng.index(5);
  nn::Mlp net = random_net(random_layout(rng, in, out), rng);
  const Matrix x = kink_free_input({&net}, batch, in, rng);
  const Matrix y = random_matrix(batch, out, rng);
  const auto fr = nn::forward(net, x);
  const auto grads = nn::backward(net, fr.cache, nn::mse_loss(fr.output, y).grad);
  auto loss = [&] { return nn::mse_loss(nn::predict(net, x), y).loss; };
  GradCheckReport report = check_parameters(net, grads, loss);
  report.merge(check_input(x, grads.input, [&](const Matrix& xi) { return nn::mse_loss(nn::predict(net, xi), y).loss; }));
  return report;
}

// Scalar heteroscedastic loss: a two-output network gives mu and the
// pre-softplus variance; the loss is the batch mean of hetero_nll_1d.
inline GradCheckReport check_hetero_1d_case(Rng& rng) {
  const int in = 1 + rng.index(3), batch = 1 + rng.index(5);
  nn::Mlp net = random_net(random_layout(rng, in, 2), rng);
  const Matrix x = kink_free_input({&net}, batch, in, rng);
  const Matrix y = random_matrix(batch, 1, rng, 2.0);
  auto eval = [&](const Matrix& out, Matrix* grad) {
    double total = 0.0;
    if (grad) grad->setZero(out.rows(), 2);
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      const double var = nn::softplus_floor(out(i, 1));
      const auto nll = nn::hetero_nll_1d(y(i, 0), out(i, 0), var);
      total += nll.loss;
      if (grad) {
        (*grad)(i, 0) = nll.d_mu / out.rows();
        (*grad)(i, 1) = nll.d_var / (1.0 + std::exp(-out(i, 1))) / out.rows();
      }
    }
    return total / out.rows();
  };
  const auto fr = nn::forward(net, x);
  Matrix g;
  eval(fr.output, &g);
  const auto grads = nn::backward(net, fr.cache, g);
  return check_parameters(net, grads, [&] { return eval(nn::predict(net, x), nullptr); });
}

// Diagonal Gaussian likelihood through HeteroModel: separate mean and
// variance networks, variance through softplus_floor.
inline GradCheckReport check_hetero_model_case(Rng& rng, nn::NllForm form) {
  const int in = 1 + rng.index(4), out = 1 + rng.index(4), batch = 1 + rng.index(5);
  const auto mean_sizes = random_layout(rng, in, out);
  const auto var_sizes = random_layout(rng, in, out);
  uncertainty::HeteroModel model(mean_sizes, var_sizes, rng, form);
  for (auto* net : {&model.mean_net(), &model.var_net()}) *net = random_net(net->layer_sizes, rng);
  const Matrix x = kink_free_input({&model.mean_net(), &model.var_net()}, batch, in, rng);
  const Matrix y = random_matrix(batch, out, rng);
  const auto g = model.loss_and_gradients(x, y);
  auto loss = [&] { return model.loss_and_gradients(x, y).loss; };
  GradCheckReport report = check_parameters(model.mean_net(), g.mean, loss);
  report.merge(check_parameters(model.var_net(), g.var, loss));
  return report;
}

}  // namespace smve::testing
