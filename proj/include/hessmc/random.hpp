#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>

namespace hessmc {

/// The single RNG type used by every stochastic routine. Each chain or
/// data generator owns its own instance.
using Rng = std::mt19937_64;

inline Eigen::VectorXd standard_normal(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd out(n);
  for (Eigen::Index i = 0; i < n; ++i) out[i] = normal(rng);
  return out;
}

/// Uniform draw on [0, 1).
inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace hessmc
