#include <cmath>
#include <set>

#include "doctest.h"
#include "gradcheck.hpp"
#include "oracles.hpp"
#include "smve/envs/acrobot.hpp"
#include "smve/uncertainty/dropout.hpp"
#include "smve/uncertainty/dynamics.hpp"
#include "smve/uncertainty/ensemble.hpp"

using namespace smve;
using namespace smve::uncertainty;
using doctest::Approx;

namespace {

Prediction point(std::initializer_list<double> mean, std::initializer_list<double> var = {}) {
  Prediction p;
  p.mean = Matrix(1, static_cast<int>(mean.size()));
  int i = 0;
  for (double m : mean) p.mean(0, i++) = m;
  p.var = Matrix::Zero(1, p.mean.cols());
  i = 0;
  for (double v : var) p.var(0, i++) = v;
  p.scalar_var = trace_rows(p.var);
  return p;
}

}  // namespace

TEST_CASE("hetero prediction with a zero variance network") {
  Rng rng(1);
  HeteroModel model({9, 4, 6}, {9, 4, 6}, rng);
  model.var_net() = nn::Mlp({9, 4, 6});
  const Prediction p = model.predict(testing::random_matrix(3, 9, rng));
  CHECK(p.mean.cols() == 6);
  CHECK(p.var.cols() == 6);
  for (Eigen::Index i = 0; i < p.var.size(); ++i) CHECK(p.var.data()[i] == Approx(std::log(2.0) + 1e-6));
  CHECK(p.scalar_var(0) == Approx(4.1589).epsilon(1e-4));
  CHECK(p.scalar_var(0) == Approx(6.0 * (std::log(2.0) + 1e-6)));
}

TEST_CASE("hetero variances stay positive on fuzzed inputs") {
  Rng rng(2);
  HeteroModel model({9, 16, 6}, {9, 16, 6}, rng);
  for (int i = 0; i < 50; ++i) {
    const Prediction p = model.predict(testing::random_matrix(20, 9, rng, 50.0));
    CHECK(p.var.minCoeff() >= 1e-6);
    CHECK(p.scalar_var.minCoeff() >= 6e-6);
    CHECK((p.scalar_var - trace_rows(p.var)).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("perfect fit at the variance floor leaves only the log-determinant") {
  Rng rng(3);
  HeteroModel model({9, 4, 6}, {9, 4, 6}, rng);
  model.mean_net() = nn::Mlp({9, 4, 6});
  model.var_net() = nn::Mlp({9, 4, 6});
  model.var_net().biases[1].setConstant(-60.0);
  Matrix y(5, 6);
  y.rowwise() = model.mean_net().biases[1];
  const double loss = model.loss_and_gradients(testing::random_matrix(5, 9, rng), y).loss;
  CHECK(loss == Approx(6.0 * std::log(1e-6)).epsilon(1e-9));
  CHECK(loss == Approx(-82.9).epsilon(1e-3));
}

TEST_CASE("hetero training lowers the loss on a fixed batch") {
  Rng rng(4);
  HeteroModel model({3, 16, 2}, {3, 16, 2}, rng);
  const Matrix x = testing::random_matrix(16, 3, rng);
  const Matrix y = testing::random_matrix(16, 2, rng);
  const double first = model.update(x, y, 0.01);
  double last = first;
  for (int i = 0; i < 100; ++i) last = model.update(x, y, 0.01);
  CHECK(last < first);
  CHECK_THROWS(model.update(Matrix(0, 3), Matrix(0, 2), 0.01));
}

TEST_CASE("hetero gradients on a single transition") {
  Rng rng(5);
  HeteroModel model({9, 4, 6}, {9, 4, 6}, rng);
  const Matrix x = testing::kink_free_input({&model.mean_net(), &model.var_net()}, 1, 9, rng);
  const Matrix y = testing::random_matrix(1, 6, rng);
  const auto g = model.loss_and_gradients(x, y);
  auto loss = [&] { return model.loss_and_gradients(x, y).loss; };
  CHECK(testing::check_parameters(model.mean_net(), g.mean, loss).max_rel < 1e-4);
  CHECK(testing::check_parameters(model.var_net(), g.var, loss).max_rel < 1e-4);
}

TEST_CASE("deterministic model") {
  Rng rng(6);
  DeterministicModel model({3, 8, 6}, rng);
  const Matrix x = testing::random_matrix(10, 3, rng);
  const Prediction p = model.predict(x);
  CHECK(p.mean.cols() == 6);
  CHECK(p.var.isZero(0.0));
  const nn::Mlp before = model.net();
  CHECK(model.update(x, p.mean, 0.01) == 0.0);
  CHECK(model.net().weights[0] == before.weights[0]);
  const Matrix y = testing::random_matrix(10, 6, rng);
  const double first = model.update(x, y, 0.01);
  double last = first;
  for (int i = 0; i < 100; ++i) last = model.update(x, y, 0.01);
  CHECK(last < first);
  CHECK_THROWS(model.update(Matrix(0, 3), Matrix(0, 6), 0.01));
}

TEST_CASE("ensemble aggregate") {
  CHECK(ensemble_aggregate({point({1, 2}), point({1, 2}), point({1, 2})}).var.isZero(0.0));
  const Prediction two = ensemble_aggregate({point({0.0}), point({2.0})});
  CHECK(two.mean(0, 0) == 1.0);
  CHECK(two.var(0, 0) == 1.0);
  CHECK_THROWS(ensemble_aggregate({}));
}

TEST_CASE("ensemble variance ignores member order") {
  Rng rng(7);
  std::vector<Prediction> members;
  for (int k = 0; k < 6; ++k) {
    Prediction p;
    p.mean = testing::random_matrix(4, 3, rng);
    p.var = testing::random_matrix(4, 3, rng).cwiseAbs();
    p.scalar_var = trace_rows(p.var);
    members.push_back(p);
  }
  auto reversed = members;
  std::reverse(reversed.begin(), reversed.end());
  CHECK((ensemble_aggregate(members).var - ensemble_aggregate(reversed).var).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((mixture_aggregate(members).var - mixture_aggregate(reversed).var).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("mixture aggregate") {
  const Prediction single = mixture_aggregate({point({0.3, -1.0}, {0.7, 2.5})});
  CHECK(single.var(0, 0) == 0.7);
  CHECK(single.var(0, 1) == 2.5);
  const Prediction same = mixture_aggregate({point({1.0}, {0.4}), point({1.0}, {0.4})});
  CHECK(same.var(0, 0) == Approx(0.4));
  const Prediction two = mixture_aggregate({point({0.0}, {1.0}), point({2.0}, {1.0})});
  CHECK(two.mean(0, 0) == 1.0);
  CHECK(two.var(0, 0) == Approx(2.0));
  CHECK(two.var(0, 0) == Approx(testing::naive_mixture_variance({0.0, 2.0}, {1.0, 1.0})));
}

TEST_CASE("mixture variance matches Monte Carlo draws") {
  Rng rng(8);
  for (int trial = 0; trial < 5; ++trial) {
    const int k = 1 + rng.index(6);
    std::vector<double> mu, var;
    std::vector<Prediction> members;
    for (int i = 0; i < k; ++i) {
      mu.push_back(rng.uniform(-3, 3));
      var.push_back(rng.uniform(0.05, 2.0));
      members.push_back(point({mu.back()}, {var.back()}));
    }
    const double mc = testing::monte_carlo_mixture_variance(mu, var, 200000, rng);
    CHECK(std::abs(mixture_aggregate(members).var(0, 0) - mc) / mc < 0.02);
  }
}

TEST_CASE("mixture variance equals learned plus disagreement") {
  Rng rng(9);
  EnsembleOptions opt;
  opt.members = 4;
  opt.mean_sizes = {9, 4, 6};
  opt.var_sizes = {9, 4, 6};
  EnsembleModel model(opt, rng);
  const Matrix x = testing::random_matrix(7, 9, rng);
  const auto b = model.variance_breakdown(x);
  CHECK((b.combined - b.learned - b.ensemble).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.combined - model.combined_predict(x).scalar_var).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.ensemble - model.predict(x).scalar_var).cwiseAbs().maxCoeff() < 1e-12);
  const Prediction p = model.combined_predict(x);
  CHECK((p.scalar_var - trace_rows(p.var)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("combined prediction needs heteroscedastic members") {
  Rng rng(10);
  EnsembleOptions opt;
  opt.members = 3;
  opt.mean_sizes = {2, 4, 1};
  EnsembleModel model(opt, rng);
  CHECK_THROWS(model.combined_predict(Matrix::Zero(1, 2)));
  CHECK_THROWS(model.variance_breakdown(Matrix::Zero(1, 2)));
  opt.members = 0;
  CHECK_THROWS(EnsembleModel(opt, rng));
}

TEST_CASE("zero trainable networks expose the scaled prior") {
  Rng rng(11);
  EnsembleOptions opt;
  opt.members = 3;
  opt.mean_sizes = {2, 8, 1};
  opt.priors = true;
  opt.prior_scale = 2.5;
  EnsembleModel model(opt, rng);
  const Matrix x = testing::random_matrix(5, 2, rng);
  for (int k = 0; k < 3; ++k) {
    std::get<DeterministicModel>(model.member(k)).net() = nn::Mlp({2, 8, 1});
    CHECK(model.member_prediction(k, x).mean == 2.5 * nn::predict(*model.prior(k), x));
  }
  CHECK(model.prior(0)->weights[0] != model.prior(1)->weights[0]);
}

TEST_CASE("priors are frozen through training") {
  Rng rng(12);
  EnsembleOptions opt;
  opt.members = 3;
  opt.mean_sizes = {2, 8, 1};
  opt.priors = true;
  EnsembleModel model(opt, rng);
  std::vector<nn::Mlp> snapshot;
  for (int k = 0; k < 3; ++k) snapshot.push_back(*model.prior(k));
  const Matrix x = testing::random_matrix(16, 2, rng), y = testing::random_matrix(16, 1, rng);
  const Matrix before = model.predict(x).mean;
  for (int i = 0; i < 50; ++i) model.update(x, y, 0.01);
  CHECK(model.predict(x).mean != before);
  for (int k = 0; k < 3; ++k) {
    for (int l = 0; l < snapshot[k].num_layers(); ++l) {
      CHECK(model.prior(k)->weights[l] == snapshot[k].weights[l]);
      CHECK(model.prior(k)->biases[l] == snapshot[k].biases[l]);
    }
  }
}

TEST_CASE("member prediction adds the prior to the trainable part") {
  Rng rng(13);
  EnsembleOptions opt;
  opt.members = 2;
  opt.mean_sizes = {2, 8, 1};
  opt.priors = true;
  opt.prior_scale = 0.5;
  EnsembleModel model(opt, rng);
  const Matrix x = testing::random_matrix(5, 2, rng);
  const Matrix member = model.member_prediction(0, x).mean;
  const Matrix trainable = std::get<DeterministicModel>(model.member(0)).predict_mean(x);
  CHECK((member - trainable - 0.5 * nn::predict(*model.prior(0), x)).cwiseAbs().maxCoeff() < 1e-15);
  opt.priors = false;
  Rng fresh(13);
  CHECK(EnsembleModel(opt, fresh).prior(0) == nullptr);
}

TEST_CASE("bootstrap resamples") {
  Rng rng(14);
  const std::vector<int> data{1, 2, 3, 4, 5, 6, 7};
  const auto boots = bootstrap_datasets(std::span<const int>(data), 4, rng);
  CHECK(boots.size() == 4);
  for (const auto& b : boots) {
    CHECK(b.size() == data.size());
    for (int v : b) CHECK(std::find(data.begin(), data.end(), v) != data.end());
  }
  const std::vector<int> one{42};
  for (const auto& b : bootstrap_datasets(std::span<const int>(one), 3, rng)) CHECK(b == one);
  const std::vector<int> none;
  CHECK_THROWS(bootstrap_datasets(std::span<const int>(none), 3, rng));
  CHECK_THROWS(bootstrap_indices(5, 0, rng));
  Rng a(15), b(15);
  CHECK(bootstrap_indices(50, 3, a) == bootstrap_indices(50, 3, b));
}

TEST_CASE("bootstrap keeps about 1 - 1/e distinct originals") {
  Rng rng(16);
  const int n = 5000;
  double total = 0.0;
  const auto boots = bootstrap_indices(n, 20, rng);
  for (const auto& idx : boots) total += std::set<int>(idx.begin(), idx.end()).size() / static_cast<double>(n);
  CHECK(std::abs(total / boots.size() - (1.0 - std::exp(-1.0))) < 0.02);
}

TEST_CASE("mc dropout") {
  Rng rng(17);
  const Matrix x = testing::random_matrix(6, 2, rng);
  DropoutModel no_drop({2, 16, 1}, rng, 0.0, 10);
  CHECK(no_drop.predict(x, rng).var.maxCoeff() < 1e-24);
  DropoutModel one_pass({2, 16, 1}, rng, 0.5, 1);
  CHECK(one_pass.predict(x, rng).var.isZero(0.0));
  DropoutModel model({2, 16, 16, 1}, rng);
  CHECK(model.p() == 0.1);
  CHECK(model.passes() == 10);
  Rng a(18), b(18);
  const Prediction pa = model.predict(x, a);
  const Prediction pb = model.predict(x, b);
  CHECK(pa.mean == pb.mean);
  CHECK(pa.var == pb.var);
  CHECK(pa.var.maxCoeff() > 0.0);
  CHECK((pa.scalar_var - trace_rows(pa.var)).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS(DropoutModel({2, 4, 1}, rng, 1.0, 10));
  CHECK_THROWS(DropoutModel({2, 4, 1}, rng, 0.1, 0));
}

TEST_CASE("model input encoding") {
  Matrix obs = Matrix::Zero(3, 6);
  obs(1, 0) = 0.5;
  const std::vector<int> actions{0, 2, 1};
  const Matrix in = encode_model_input(obs, actions);
  CHECK(in.cols() == 9);
  CHECK(in(1, 0) == 0.5);
  CHECK(in(0, 6) == 1.0);
  CHECK(in(1, 8) == 1.0);
  CHECK(in(2, 7) == 1.0);
  CHECK(in.rightCols(3).sum() == 3.0);
  const std::vector<int> bad{3, 0, 0};
  CHECK_THROWS(encode_model_input(obs, bad));
}

TEST_CASE("dynamics models share the prediction contract") {
  Rng rng(19);
  const Matrix obs = testing::random_matrix(4, 6, rng);
  const std::vector<int> actions{0, 1, 2, 1};
  DeterministicDynamics det(4, rng);
  HeteroDynamics het(4, rng);
  EnsembleDynamics ens(5, 4, false, EnsembleSignal::kEnsemble, rng);
  EnsembleDynamics ens_h(5, 4, true, EnsembleSignal::kCombined, rng);
  for (const DynamicsModel* m : std::initializer_list<const DynamicsModel*>{&det, &het, &ens, &ens_h}) {
    const Prediction p = m->predict(obs, actions);
    CHECK(p.mean.rows() == 4);
    CHECK(p.mean.cols() == 6);
    CHECK(p.scalar_var.size() == 4);
    CHECK(p.scalar_var.minCoeff() >= 0.0);
  }
  CHECK(det.predict(obs, actions).scalar_var.isZero(0.0));
  CHECK(het.predict(obs, actions).scalar_var.minCoeff() > 0.0);
  CHECK((ens_h.predict(obs, actions).scalar_var - ens_h.breakdown(obs, actions).combined).cwiseAbs().maxCoeff() ==
        0.0);
  CHECK_THROWS(ens.breakdown(obs, actions));
}

TEST_CASE("true dynamics wrapper") {
  Rng rng(20);
  TrueDynamics truth;
  Matrix obs(2, 6);
  obs.row(0) = envs::observe(envs::acrobot_reset(rng));
  obs.row(1) = envs::observe(envs::acrobot_reset(rng));
  const std::vector<int> actions{2, 0};
  const Prediction p = truth.predict(obs, actions);
  CHECK(p.scalar_var.isZero(0.0));
  for (int i = 0; i < 2; ++i) {
    const envs::Observation row = obs.row(i);
    CHECK((p.mean.row(i) - envs::true_next_observation(row, actions[i])).norm() < 1e-12);
  }
}

TEST_CASE("dynamics models learn from acrobot transitions") {
  Rng rng(21);
  Matrix obs(64, 6), next(64, 6);
  std::vector<int> actions(64);
  for (int i = 0; i < 64; ++i) {
    envs::AcrobotState s{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
    actions[i] = rng.index(3);
    obs.row(i) = envs::observe(s);
    next.row(i) = envs::observe(envs::acrobot_step(s, actions[i]).state);
  }
  HeteroDynamics het(16, rng);
  EnsembleDynamics ens(3, 16, false, EnsembleSignal::kEnsemble, rng);
  for (DynamicsModel* m : std::initializer_list<DynamicsModel*>{&het, &ens}) {
    const double first = m->update(obs, actions, next, 0.01);
    double last = first;
    for (int i = 0; i < 200; ++i) last = m->update(obs, actions, next, 0.01);
    CHECK(last < first);
  }
}
