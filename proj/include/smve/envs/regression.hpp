#pragma once

#include <vector>

#include "smve/rng.hpp"

namespace smve::envs {

struct RegressionSample {
  double x = 0.0;
  double y = 0.0;
};

/// x + sin(4x) + sin(13x)
double regression_target(double x);

/// n noiseless samples with x uniform on the open interval (lo, hi).
std::vector<RegressionSample> make_regression_dataset(int n, double lo, double hi, Rng& rng);

}  // namespace smve::envs
