#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace smve {

/// Mixes a root seed with a stream name into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view stream);

/// Seeded random source. Every stochastic operation in the library takes one
/// of these explicitly; there is no global generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Uniform draw in [lo, hi).
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal(double mean = 0.0, double stddev = 1.0) {
    return std::normal_distribution<double>(mean, stddev)(engine_);
  }
  /// Uniform integer in [0, n).
  int index(int n) { return std::uniform_int_distribution<int>(0, n - 1)(engine_); }
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

  /// Fresh generator for a named sub-stream; advances this generator once.
  Rng split(std::string_view stream) { return Rng(derive_seed(engine_(), stream)); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace smve
