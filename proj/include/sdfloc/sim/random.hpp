// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace sdfloc::sim {

/// Mixes a seed and a salt into an independent stream seed (SplitMix64).
inline uint64_t mix_seed(uint64_t seed, uint64_t salt) {
  uint64_t z = seed + salt * 0x9E3779B97F4A7C15ull + 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Deterministic random stream. Wraps mt19937_64 with explicit transforms
/// (Box-Muller for normals) so draws do not depend on the standard
/// library's unspecified distribution algorithms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  int uniform_int(int lo, int hi_inclusive) {
    const int span = hi_inclusive - lo + 1;
    int v = lo + static_cast<int>(uniform() * span);
    return v > hi_inclusive ? hi_inclusive : v;
  }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) {
      u1 = uniform();
    }
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  double gaussian(double sigma) { return sigma * gaussian(); }

  Eigen::Vector3d gaussian_vector(double sigma) {
    return {gaussian(sigma), gaussian(sigma), gaussian(sigma)};
  }

  Eigen::Vector3d unit_vector() {
    while (true) {
      const Eigen::Vector3d v(uniform(-1.0, 1.0), uniform(-1.0, 1.0), uniform(-1.0, 1.0));
      const double n = v.norm();
      if (n > 1e-6 && n <= 1.0) {
        return v / n;
      }
    }
  }

  /// Independent stream derived from this stream's seed and a salt.
  Rng fork(uint64_t salt) const { return Rng(mix_seed(seed_, salt)); }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sdfloc::sim
