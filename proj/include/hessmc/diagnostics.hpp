#pragma once

#include "hessmc/spd.hpp"

#include <vector>

namespace hessmc {

/// rho_1..rho_max_lag with the biased (1/N) autocovariance estimator.
/// Throws ConstantSeries, or std::invalid_argument when size <= max_lag.
Vector autocorrelation(const Vector& series, Eigen::Index max_lag);

struct ChainStats {
  double tau = 1.0;    // integrated autocorrelation time
  double n_eff = 0.0;  // N / tau
  double se = 0.0;     // sigma / n_eff
  double se_sqrt = 0.0;  // sigma / sqrt(n_eff), the conventional MCSE
  double sigma = 0.0;
  double mean = 0.0;
  long n = 0;
  long truncation_lag = 0;  // number of lags summed
  double acceptance_rate = 0.0;
};

inline constexpr double kIactCutoff = 0.05;
inline constexpr double kIactFloor = 0.1;

/// tau = 1 + 2 sum_{t < T} rho_t, where T is the first lag with rho_t < 0.05
/// (which includes every rho_t <= 0), capped at N/10. tau is floored at 0.1.
ChainStats iact_ess_se(const Vector& series, double sigma_tilde);

/// Same with sigma_tilde = sample standard deviation of the series.
ChainStats iact_ess_se(const Vector& series);

struct CredibleBounds {
  Vector lo;
  Vector hi;
  Vector mean;
};

/// Per-column empirical percentile interval at `level` (linear
/// interpolation between order statistics). Throws TooFewSamples for n < 100.
CredibleBounds credible_interval(const Matrix& samples, double level = 0.95);

/// D_KL(q || p) for q log-normal with log-mean m_q and log-covariance
/// Sigma_q, and p = N(m_p, Sigma_p). Throws NotPositiveDefinite.
double kld_lognormal_normal(const Vector& m_q, const Matrix& sigma_q,
                            const Vector& m_p, const Matrix& sigma_p);

/// Mean and covariance of the log-normal with log-mean m and log-covariance S.
struct Moments {
  Vector mean;
  Matrix covariance;
};
Moments lognormal_moments(const Vector& m, const Matrix& s);

/// Row means: the domain-average series of a chain.
Vector domain_average(const Matrix& samples);

/// Column `node` of the samples.
Vector probe_series(const Matrix& samples, Eigen::Index node);

}  // namespace hessmc
