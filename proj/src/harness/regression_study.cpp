#include "smve/harness/regression_study.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "smve/envs/regression.hpp"
#include "smve/harness/curve_log.hpp"
#include "smve/uncertainty/dropout.hpp"
#include "smve/uncertainty/ensemble.hpp"

namespace smve::harness {

namespace {

using nn::Matrix;
using uncertainty::Prediction;

constexpr double kTrainLo = -1.0;
constexpr double kTrainHi = 2.0;
constexpr double kGridLo = -1.5;
constexpr double kGridHi = 2.5;

Matrix gather(const Matrix& m, const std::vector<int>& idx, std::size_t begin, std::size_t end) {
  Matrix out(static_cast<Eigen::Index>(end - begin), m.cols());
  for (std::size_t i = begin; i < end; ++i) out.row(static_cast<Eigen::Index>(i - begin)) = m.row(idx[i]);
  return out;
}

// Minibatch epochs over `rows` (indices into x/y), reshuffled every epoch.
template <typename Step>
void train_epochs(const Matrix& x, const Matrix& y, std::vector<int> rows, int epochs, int batch, Rng& rng,
                  Step&& step) {
  for (int e = 0; e < epochs; ++e) {
    std::shuffle(rows.begin(), rows.end(), rng.engine());
    for (std::size_t b = 0; b < rows.size(); b += batch) {
      const std::size_t end = std::min(rows.size(), b + static_cast<std::size_t>(batch));
      step(gather(x, rows, b, end), gather(y, rows, b, end));
    }
  }
}

}  // namespace

std::vector<int> regression_layout(const std::string& capacity) {
  if (capacity == "large") return {1, 64, 64, 64, 1};
  if (capacity == "medium") return {1, 2048, 1};
  if (capacity == "small") return {1, 64, 1};
  throw ConfigError("capacity", "must be large, medium or small");
}

std::vector<double> evaluation_grid(int points) {
  if (points < 2) throw ConfigError("grid_points", "must be at least 2");
  std::vector<double> grid(points);
  for (int i = 0; i < points; ++i) {
    grid[i] = kGridLo + (kGridHi - kGridLo) * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  grid.back() = kGridHi;
  return grid;
}

RegressionCurve run_regression(const ExperimentConfig& config, std::uint64_t seed) {
  validate(config);
  Rng data_rng(derive_seed(seed, "data"));
  Rng init_rng(derive_seed(seed, "init"));
  Rng train_rng(derive_seed(seed, "train"));
  Rng eval_rng(derive_seed(seed, "eval"));

  const auto data = envs::make_regression_dataset(config.dataset_size, kTrainLo, kTrainHi, data_rng);
  const int n = static_cast<int>(data.size());
  Matrix x(n, 1), y(n, 1);
  for (int i = 0; i < n; ++i) {
    x(i, 0) = data[i].x;
    y(i, 0) = data[i].y;
  }
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);

  const std::vector<double> grid = evaluation_grid(config.grid_points);
  Matrix gx(static_cast<Eigen::Index>(grid.size()), 1);
  for (std::size_t i = 0; i < grid.size(); ++i) gx(static_cast<Eigen::Index>(i), 0) = grid[i];

  const std::vector<int> layout = regression_layout(config.capacity);
  const double lr = config.regression_lr;
  const int epochs = config.epochs;
  const int batch = config.regression_batch;
  Prediction pred;

  if (config.method == "hetero") {
    uncertainty::HeteroModel model(layout, {1, 64, 1}, init_rng, nn::NllForm::kHalf);
    train_epochs(x, y, all, epochs, batch, train_rng,
                 [&](const Matrix& xb, const Matrix& yb) { model.update(xb, yb, lr); });
    pred = model.predict(gx);
  } else if (config.method == "mc-dropout") {
    uncertainty::DropoutModel model(layout, init_rng, config.dropout_p, config.dropout_passes);
    train_epochs(x, y, all, epochs, batch, train_rng,
                 [&](const Matrix& xb, const Matrix& yb) { model.update(xb, yb, lr, train_rng); });
    pred = model.predict(gx, eval_rng);
  } else {
    uncertainty::EnsembleOptions options;
    options.members = config.regression_members;
    options.mean_sizes = layout;
    options.form = nn::NllForm::kHalf;
    options.prior_scale = config.prior_scale;
    options.priors = config.method == "rpf" || config.method == "rpf-bootstrap";
    if (config.method == "ensemble+hetero") options.var_sizes = {1, 64, 1};
    uncertainty::EnsembleModel ensemble(options, init_rng);

    std::vector<std::vector<int>> member_rows(options.members, all);
    if (config.method == "rpf-bootstrap") member_rows = uncertainty::bootstrap_indices(n, options.members, train_rng);
    for (int k = 0; k < options.members; ++k) {
      Rng member_rng = train_rng.split("member-" + std::to_string(k));
      train_epochs(x, y, member_rows[k], epochs, batch, member_rng,
                   [&](const Matrix& xb, const Matrix& yb) { ensemble.update_member(k, xb, yb, lr); });
    }
    pred = config.method == "ensemble+hetero" ? ensemble.combined_predict(gx) : ensemble.predict(gx);
  }

  RegressionCurve curve;
  curve.method = config.method;
  curve.capacity = config.capacity;
  curve.lr = lr;
  curve.x = grid;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    curve.y_true.push_back(envs::regression_target(grid[i]));
    curve.mean.push_back(pred.mean(r, 0));
    curve.std.push_back(std::sqrt(pred.var(r, 0)));
  }
  return curve;
}

void write_regression_csv(const RegressionCurve& curve, std::ostream& out) {
  out << "x,y_true,mean,std\n";
  for (std::size_t i = 0; i < curve.x.size(); ++i) {
    out << format_metric(curve.x[i]) << ',' << format_metric(curve.y_true[i]) << ',' << format_metric(curve.mean[i])
        << ',' << format_metric(curve.std[i]) << '\n';
  }
}

std::string regression_file_name(const RegressionCurve& curve) {
  return "regression_" + curve.method + "_" + curve.capacity + "_lr" + format_metric(curve.lr) + ".csv";
}

}  // namespace smve::harness
