#include "hessmc/diagnostics.hpp"

#include "hessmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hessmc {

namespace {

// Centered series and its lag-0 autocovariance (times N).
std::pair<Vector, double> centered(const Vector& series) {
  const Vector c = series.array() - series.mean();
  const double c0 = c.squaredNorm();
  // Relative test so that a constant series with rounding noise is still
  // reported as constant.
  const double scale = series.cwiseAbs().maxCoeff();
  if (!(c0 > 0.0) || std::sqrt(c0 / series.size()) <= 1e-14 * scale) {
    throw ConstantSeries();
  }
  return {c, c0};
}

double lag_product(const Vector& c, Eigen::Index t) {
  const Eigen::Index n = c.size();
  return c.head(n - t).dot(c.tail(n - t));
}

}  // namespace

Vector autocorrelation(const Vector& series, Eigen::Index max_lag) {
  if (max_lag < 0 || series.size() <= max_lag) {
    throw std::invalid_argument("series must be longer than max_lag");
  }
  const auto [c, c0] = centered(series);
  Vector rho(max_lag);
  for (Eigen::Index t = 1; t <= max_lag; ++t) rho[t - 1] = lag_product(c, t) / c0;
  return rho;
}

ChainStats iact_ess_se(const Vector& series, double sigma_tilde) {
  if (series.size() < 2) throw TooFewSamples(series.size(), 2);
  const auto [c, c0] = centered(series);
  const Eigen::Index n = series.size();
  const Eigen::Index cap = std::max<Eigen::Index>(1, n / 10);

  double sum = 0.0;
  Eigen::Index t = 1;
  for (; t <= cap; ++t) {
    const double rho = lag_product(c, t) / c0;
    if (rho < kIactCutoff) break;
    sum += rho;
  }
  ChainStats s;
  s.n = static_cast<long>(n);
  s.truncation_lag = static_cast<long>(t - 1);
  s.tau = std::max(kIactFloor, 1.0 + 2.0 * sum);
  s.n_eff = static_cast<double>(n) / s.tau;
  s.sigma = sigma_tilde;
  s.mean = series.mean();
  s.se = sigma_tilde / s.n_eff;
  s.se_sqrt = sigma_tilde / std::sqrt(s.n_eff);
  return s;
}

ChainStats iact_ess_se(const Vector& series) {
  const Eigen::Index n = series.size();
  if (n < 2) throw TooFewSamples(static_cast<std::size_t>(n), 2);
  const double var = (series.array() - series.mean()).square().sum() / (n - 1);
  return iact_ess_se(series, std::sqrt(var));
}

CredibleBounds credible_interval(const Matrix& samples, double level) {
  if (samples.rows() < 100) {
    throw TooFewSamples(static_cast<std::size_t>(samples.rows()), 100);
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("credible level must lie in (0, 1)");
  }
  const Eigen::Index n = samples.rows();
  const double lo_q = 0.5 * (1.0 - level);
  const double hi_q = 1.0 - lo_q;
  auto quantile = [n](const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(n - 1);
    const auto i = static_cast<Eigen::Index>(std::floor(pos));
    const double frac = pos - static_cast<double>(i);
    if (i + 1 >= n) return sorted[n - 1];
    return sorted[i] + frac * (sorted[i + 1] - sorted[i]);
  };

  CredibleBounds out;
  out.lo.resize(samples.cols());
  out.hi.resize(samples.cols());
  out.mean = samples.colwise().mean().transpose();
  std::vector<double> col(n);
  for (Eigen::Index j = 0; j < samples.cols(); ++j) {
    for (Eigen::Index i = 0; i < n; ++i) col[i] = samples(i, j);
    std::sort(col.begin(), col.end());
    out.lo[j] = quantile(col, lo_q);
    out.hi[j] = quantile(col, hi_q);
  }
  return out;
}

Moments lognormal_moments(const Vector& m, const Matrix& s) {
  const Vector half = m + 0.5 * s.diagonal();
  Moments out;
  out.mean = half.array().exp();
  const Eigen::Index n = m.size();
  out.covariance.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out.covariance(i, j) = std::exp(half[i] + half[j]) * std::expm1(s(i, j));
    }
  }
  return out;
}

double kld_lognormal_normal(const Vector& m_q, const Matrix& sigma_q,
                            const Vector& m_p, const Matrix& sigma_p) {
  const Eigen::Index n = m_q.size();
  if (sigma_q.rows() != n || sigma_q.cols() != n || m_p.size() != n ||
      sigma_p.rows() != n || sigma_p.cols() != n) {
    throw DimensionMismatch(static_cast<std::size_t>(n),
                            static_cast<std::size_t>(sigma_p.rows()));
  }
  const SpdFactor fq = cholesky(sigma_q);
  const SpdFactor fp = cholesky(sigma_p);
  const Moments q = lognormal_moments(m_q, sigma_q);
  const Vector dm = q.mean - m_p;
  const Matrix second = q.covariance + dm * dm.transpose();
  const double trace = (fp.inverse_dense() * second).trace();
  return -0.5 * (fq.log_det() - fp.log_det()) - 0.5 * static_cast<double>(n) -
         m_q.sum() + 0.5 * trace;
}

Vector domain_average(const Matrix& samples) {
  return samples.rowwise().mean();
}

Vector probe_series(const Matrix& samples, Eigen::Index node) {
  if (node < 0 || node >= samples.cols()) {
    throw std::invalid_argument("probe node out of range");
  }
  return samples.col(node);
}

}  // namespace hessmc
