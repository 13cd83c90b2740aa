#pragma once

#include "hessmc/forward.hpp"
#include "hessmc/prior.hpp"
#include "hessmc/spd.hpp"

#include <memory>
#include <string>

namespace hessmc {

enum class HessianMode { analytic, gauss_newton, fd_of_grad };

/// Negative log-density J(psi) (up to an additive constant) of a sampling
/// target, with its gradient.
///
/// Points outside the support evaluate to J = +inf; samplers treat those
/// proposals as automatic rejections. Implementations are immutable and
/// safe to evaluate concurrently.
class TargetDensity {
 public:
  struct Evaluation {
    double value = 0.0;
    FieldVector gradient;  // empty when value is +inf
  };

  virtual ~TargetDensity() = default;

  virtual Eigen::Index dim() const = 0;
  virtual std::string name() const = 0;
  virtual bool in_support(const FieldVector& psi) const;

  virtual double value(const FieldVector& psi) const {
    return evaluate(psi).value;
  }
  FieldVector gradient(const FieldVector& psi) const {
    return evaluate(psi).gradient;
  }
  virtual Evaluation evaluate(const FieldVector& psi) const = 0;

  /// Hessian of J at psi. The base class supports fd_of_grad only.
  /// Throws ModeUnsupported for modes the target does not provide.
  virtual Matrix hessian(const FieldVector& psi, HessianMode mode) const;

  /// Fixed SPD preconditioner (H_MAP) built at a MAP estimate.
  virtual SpdFactor map_preconditioner(const FieldVector& psi_map) const = 0;

 protected:
  void check_dim(const FieldVector& psi) const;
};

/// Symmetrized central-difference Hessian of the gradient, step
/// 1e-5 * max(1, |psi_j|) per coordinate.
Matrix fd_hessian(const TargetDensity& target, const FieldVector& psi,
                  double rel_step = 1e-5);

/// Dispatches to target.hessian(psi, mode).
Matrix hessian_at(const TargetDensity& target, const FieldVector& psi,
                  HessianMode mode);

/// J = 1/2 (psi - m)^T P (psi - m).
class GaussianTarget final : public TargetDensity {
 public:
  GaussianTarget(FieldVector mean, SpdFactor precision);

  /// 1-D convenience: mean m, variance sigma2.
  static GaussianTarget scalar(double mean, double variance);

  Eigen::Index dim() const override { return mean_.size(); }
  std::string name() const override { return "gaussian"; }
  Evaluation evaluate(const FieldVector& psi) const override;
  Matrix hessian(const FieldVector& psi, HessianMode mode) const override;
  SpdFactor map_preconditioner(const FieldVector& psi_map) const override;

  const FieldVector& mean() const noexcept { return mean_; }
  const SpdFactor& precision() const noexcept { return precision_; }

 private:
  FieldVector mean_;
  SpdFactor precision_;
  Matrix precision_dense_;
};

struct GaussianValue {
  double value;
  FieldVector gradient;
};

/// Throws DimensionMismatch when psi has the wrong length.
GaussianValue gaussian_logdensity_grad(const GaussianTarget& target,
                                       const FieldVector& psi);

/// Shifted log-normal: log(psi - c) ~ N(m_l, Sigma_l), with
///   J = 1/2 ||Lambda^{1/2} (log(psi - c) - m_l)||^2 + sum_i log(psi_i - c),
/// Lambda = Sigma_l^{-1}. Support is psi > c componentwise.
class LogNormalTarget final : public TargetDensity {
 public:
  LogNormalTarget(FieldVector log_mean, Matrix log_covariance, double shift = 0.0);

  Eigen::Index dim() const override { return log_mean_.size(); }
  std::string name() const override { return "lognormal"; }
  bool in_support(const FieldVector& psi) const override;
  Evaluation evaluate(const FieldVector& psi) const override;
  Matrix hessian(const FieldVector& psi, HessianMode mode) const override;
  SpdFactor map_preconditioner(const FieldVector& psi_map) const override;

  /// exp(m_l - Sigma_l 1) + c, the stationary point of J.
  FieldVector map_point() const;

  const FieldVector& log_mean() const noexcept { return log_mean_; }
  const Matrix& log_covariance() const noexcept { return log_covariance_; }
  const Matrix& log_precision() const noexcept { return log_precision_; }
  double shift() const noexcept { return shift_; }

 private:
  FieldVector log_mean_;
  Matrix log_covariance_;
  Matrix log_precision_;
  double shift_;
};

struct LogNormalDerivatives {
  double value;
  FieldVector gradient;
  Matrix hessian;
};

/// Value, gradient and analytic Hessian; throws OutOfSupport with the first
/// offending component.
LogNormalDerivatives lognormal_J_grad_hess(const LogNormalTarget& target,
                                           const FieldVector& psi);

/// J = misfit(theta) + 1/2 (theta - m)^T R (theta - m) for the Darcy
/// inverse problem.
class PosteriorTarget final : public TargetDensity {
 public:
  PosteriorTarget(std::shared_ptr<const BilaplacianPrior> prior,
                  DarcyProblem problem, ObservationPlan plan, Vector data,
                  double sigma);

  Eigen::Index dim() const override { return prior_->dim(); }
  std::string name() const override { return "posterior"; }
  Evaluation evaluate(const FieldVector& psi) const override;
  double value(const FieldVector& psi) const override;
  Matrix hessian(const FieldVector& psi, HessianMode mode) const override;

  /// Low-rank regularized Gauss-Newton Hessian at psi_map, truncated at
  /// kDefaultRelativeTruncation of the dominant whitened eigenvalue.
  SpdFactor map_preconditioner(const FieldVector& psi_map) const override;

  double misfit_term(const FieldVector& psi) const;
  double prior_term(const FieldVector& psi) const;

  const BilaplacianPrior& prior() const noexcept { return *prior_; }
  const DarcyProblem& problem() const noexcept { return problem_; }
  const ObservationPlan& plan() const noexcept { return plan_; }
  const Vector& data() const noexcept { return data_; }
  double sigma() const noexcept { return sigma_; }

  void set_truncation(double relative_threshold) noexcept {
    truncation_ = relative_threshold;
  }

 private:
  std::shared_ptr<const BilaplacianPrior> prior_;
  DarcyProblem problem_;
  ObservationPlan plan_;
  Vector data_;
  double sigma_;
  double truncation_ = kDefaultRelativeTruncation;
};

struct PosteriorValue {
  double value;
  FieldVector gradient;
};

PosteriorValue posterior_J_grad(const PosteriorTarget& target,
                                const FieldVector& psi);

}  // namespace hessmc
