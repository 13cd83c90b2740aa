#include "hessmc/targets.hpp"

#include "hessmc/errors.hpp"

#include <cmath>
#include <limits>

namespace hessmc {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

bool TargetDensity::in_support(const FieldVector& psi) const {
  return psi.allFinite();
}

void TargetDensity::check_dim(const FieldVector& psi) const {
  if (psi.size() != dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(dim()),
                            static_cast<std::size_t>(psi.size()));
  }
}

Matrix TargetDensity::hessian(const FieldVector& psi, HessianMode mode) const {
  if (mode != HessianMode::fd_of_grad) {
    throw ModeUnsupported(name() + " target supports only fd_of_grad Hessians");
  }
  return fd_hessian(*this, psi);
}

Matrix fd_hessian(const TargetDensity& target, const FieldVector& psi,
                  double rel_step) {
  const Eigen::Index n = target.dim();
  Matrix h(n, n);
  FieldVector x = psi;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double step = rel_step * std::max(1.0, std::abs(psi[j]));
    x[j] = psi[j] + step;
    const auto plus = target.evaluate(x);
    x[j] = psi[j] - step;
    const auto minus = target.evaluate(x);
    x[j] = psi[j];
    if (!std::isfinite(plus.value) || !std::isfinite(minus.value)) {
      throw OutOfSupport(static_cast<std::size_t>(j));
    }
    h.col(j) = (plus.gradient - minus.gradient) / (2.0 * step);
  }
  return 0.5 * (h + h.transpose());
}

Matrix hessian_at(const TargetDensity& target, const FieldVector& psi,
                  HessianMode mode) {
  return target.hessian(psi, mode);
}

// ---------------------------------------------------------------- Gaussian

GaussianTarget::GaussianTarget(FieldVector mean, SpdFactor precision)
    : mean_(std::move(mean)),
      precision_(std::move(precision)),
      precision_dense_(precision_.dense()) {
  if (precision_.dim() != mean_.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(mean_.size()),
                            static_cast<std::size_t>(precision_.dim()));
  }
}

GaussianTarget GaussianTarget::scalar(double mean, double variance) {
  if (!(variance > 0.0)) throw NonPositiveParameter("variance");
  return GaussianTarget(FieldVector::Constant(1, mean),
                        cholesky(Matrix::Constant(1, 1, 1.0 / variance)));
}

TargetDensity::Evaluation GaussianTarget::evaluate(const FieldVector& psi) const {
  check_dim(psi);
  const Vector d = psi - mean_;
  Vector g = precision_dense_ * d;
  return {0.5 * d.dot(g), std::move(g)};
}

Matrix GaussianTarget::hessian(const FieldVector& psi, HessianMode mode) const {
  check_dim(psi);
  if (mode == HessianMode::fd_of_grad) return fd_hessian(*this, psi);
  return precision_dense_;
}

SpdFactor GaussianTarget::map_preconditioner(const FieldVector&) const {
  return precision_;
}

GaussianValue gaussian_logdensity_grad(const GaussianTarget& target,
                                       const FieldVector& psi) {
  auto e = target.evaluate(psi);
  return {e.value, std::move(e.gradient)};
}

// --------------------------------------------------------------- log-normal

LogNormalTarget::LogNormalTarget(FieldVector log_mean, Matrix log_covariance,
                                 double shift)
    : log_mean_(std::move(log_mean)),
      log_covariance_(symmetrized(log_covariance)),
      shift_(shift) {
  if (log_covariance_.rows() != log_mean_.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(log_mean_.size()),
                            static_cast<std::size_t>(log_covariance_.rows()));
  }
  if (shift < 0.0) throw NonPositiveParameter("shift");
  const auto cov = cholesky(log_covariance_);
  log_precision_ = cov.inverse_dense();
}

bool LogNormalTarget::in_support(const FieldVector& psi) const {
  return psi.allFinite() && (psi.array() > shift_).all();
}

TargetDensity::Evaluation LogNormalTarget::evaluate(const FieldVector& psi) const {
  check_dim(psi);
  if (!in_support(psi)) return {kInf, {}};
  const Vector x = psi.array() - shift_;
  const Vector r = x.array().log().matrix() - log_mean_;
  const Vector lr = log_precision_ * r;
  Evaluation out;
  out.value = 0.5 * r.dot(lr) + x.array().log().sum();
  out.gradient = (lr.array() + 1.0) / x.array();
  return out;
}

Matrix LogNormalTarget::hessian(const FieldVector& psi, HessianMode mode) const {
  check_dim(psi);
  if (mode == HessianMode::gauss_newton) {
    throw ModeUnsupported("lognormal target has no Gauss-Newton Hessian");
  }
  if (mode == HessianMode::fd_of_grad) return fd_hessian(*this, psi);
  return lognormal_J_grad_hess(*this, psi).hessian;
}

SpdFactor LogNormalTarget::map_preconditioner(const FieldVector& psi_map) const {
  return eigen_factor(hessian(psi_map, HessianMode::analytic));
}

FieldVector LogNormalTarget::map_point() const {
  const Vector ones = Vector::Ones(dim());
  return (log_mean_ - log_covariance_ * ones).array().exp() + shift_;
}

LogNormalDerivatives lognormal_J_grad_hess(const LogNormalTarget& target,
                                           const FieldVector& psi) {
  if (psi.size() != target.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(target.dim()),
                            static_cast<std::size_t>(psi.size()));
  }
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    if (!(psi[i] > target.shift())) throw OutOfSupport(static_cast<std::size_t>(i));
  }
  const Matrix& lambda = target.log_precision();
  const Vector x = psi.array() - target.shift();
  const Vector r = x.array().log().matrix() - target.log_mean();
  const Vector lr = lambda * r;

  LogNormalDerivatives out;
  out.value = 0.5 * r.dot(lr) + x.array().log().sum();
  out.gradient = (lr.array() + 1.0) / x.array();
  // d/dx_j [ (Lambda r)_j + 1 ] / x_j with dr_i/dx_j = delta_ij / x_j.
  const Vector inv = x.cwiseInverse();
  out.hessian = inv.asDiagonal() * lambda * inv.asDiagonal();
  out.hessian.diagonal().array() -= (lr.array() + 1.0) * inv.array().square();
  return out;
}

// ---------------------------------------------------------------- posterior

PosteriorTarget::PosteriorTarget(std::shared_ptr<const BilaplacianPrior> prior,
                                 DarcyProblem problem, ObservationPlan plan,
                                 Vector data, double sigma)
    : prior_(std::move(prior)),
      problem_(std::move(problem)),
      plan_(std::move(plan)),
      data_(std::move(data)),
      sigma_(sigma) {
  if (!(sigma_ > 0.0)) throw NonPositiveParameter("sigma");
  if (data_.size() != plan_.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(plan_.size()),
                            static_cast<std::size_t>(data_.size()));
  }
  if (prior_->dim() != problem_.mesh.num_nodes()) {
    throw DimensionMismatch(static_cast<std::size_t>(problem_.mesh.num_nodes()),
                            static_cast<std::size_t>(prior_->dim()));
  }
  problem_.validate();
  observation_matrix(problem_.mesh, plan_);  // reject points outside early
}

TargetDensity::Evaluation PosteriorTarget::evaluate(const FieldVector& psi) const {
  check_dim(psi);
  if (!psi.allFinite()) return {kInf, {}};
  auto m = misfit_and_gradient(problem_, psi, plan_, data_, sigma_);
  Evaluation out;
  out.value = m.value + prior_->penalty(psi);
  out.gradient = m.gradient + prior_->penalty_gradient(psi);
  return out;
}

double PosteriorTarget::value(const FieldVector& psi) const {
  check_dim(psi);
  if (!psi.allFinite()) return kInf;
  return misfit_term(psi) + prior_term(psi);
}

Matrix PosteriorTarget::hessian(const FieldVector& psi, HessianMode mode) const {
  check_dim(psi);
  switch (mode) {
    case HessianMode::analytic:
      throw ModeUnsupported("posterior target has no analytic Hessian");
    case HessianMode::gauss_newton:
      return misfit_hessian_gn(problem_, psi, plan_, sigma_) + prior_->precision();
    case HessianMode::fd_of_grad:
      break;
  }
  return fd_hessian(*this, psi);
}

SpdFactor PosteriorTarget::map_preconditioner(const FieldVector& psi_map) const {
  const Matrix h = misfit_hessian_gn(problem_, psi_map, plan_, sigma_);
  return low_rank_hessian(h, prior_->precision_factor(), truncation_, true).factor();
}

double PosteriorTarget::misfit_term(const FieldVector& psi) const {
  return misfit(problem_, psi, plan_, data_, sigma_);
}

double PosteriorTarget::prior_term(const FieldVector& psi) const {
  return prior_->penalty(psi);
}

PosteriorValue posterior_J_grad(const PosteriorTarget& target,
                                const FieldVector& psi) {
  auto e = target.evaluate(psi);
  return {e.value, std::move(e.gradient)};
}

}  // namespace hessmc
