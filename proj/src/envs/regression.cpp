#include "smve/envs/regression.hpp"

#include <cmath>
#include <stdexcept>

namespace smve::envs {

double regression_target(double x) { return x + std::sin(4.0 * x) + std::sin(13.0 * x); }

std::vector<RegressionSample> make_regression_dataset(int n, double lo, double hi, Rng& rng) {
  if (n < 1) throw std::invalid_argument("make_regression_dataset: n must be positive");
  if (!(lo < hi)) throw std::invalid_argument("make_regression_dataset: need lo < hi");
  std::vector<RegressionSample> data;
  data.reserve(n);
  while (static_cast<int>(data.size()) < n) {
    const double x = rng.uniform(lo, hi);
    if (x <= lo) continue;  // open interval
    data.push_back({x, regression_target(x)});
  }
  return data;
}

}  // namespace smve::envs
