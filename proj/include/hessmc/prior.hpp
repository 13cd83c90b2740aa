#pragma once

#include "hessmc/mesh.hpp"
#include "hessmc/random.hpp"
#include "hessmc/spd.hpp"

#include <Eigen/Dense>

namespace hessmc {

/// Anisotropy tensor of the diffusion term: eigenvalue b along
/// m = (cos beta, sin beta) and a across it.
struct Anisotropy {
  double a = 1.0;
  double b = 1.0;
  double beta = 0.0;
};

/// [[a sin^2 + b cos^2, (b-a) sin cos], [(b-a) sin cos, b sin^2 + a cos^2]].
/// Throws NonPositiveParameter for a <= 0 or b <= 0.
Eigen::Matrix2d anisotropy_matrix(double a, double b, double beta);

/// Consistent FE mass matrix N_ij = int phi_i phi_j.
Matrix assemble_mass(const Mesh2D& mesh);

/// K_ij = int gamma Psi grad(phi_i).grad(phi_j) + delta phi_i phi_j with
/// natural (zero-flux) boundary conditions.
Matrix assemble_stiffness(const Mesh2D& mesh, double gamma, double delta,
                          const Eigen::Matrix2d& psi);

/// Gaussian field prior with covariance A^{-2}, A = N^{-1} K the discrete
/// reaction-diffusion operator. The precision is R = K N^{-1} K, so that
/// -log p(psi) = 1/2 (psi - m)^T R (psi - m) + const.
class BilaplacianPrior {
 public:
  BilaplacianPrior(Mesh2D mesh, double gamma, double delta,
                   Anisotropy anisotropy, FieldVector mean);

  const Mesh2D& mesh() const noexcept { return mesh_; }
  double gamma() const noexcept { return gamma_; }
  double delta() const noexcept { return delta_; }
  const Anisotropy& anisotropy() const noexcept { return anisotropy_; }
  const FieldVector& mean() const noexcept { return mean_; }
  Eigen::Index dim() const noexcept { return mean_.size(); }

  const Matrix& mass() const noexcept { return mass_; }
  const Matrix& stiffness() const noexcept { return stiffness_; }
  const Matrix& precision() const noexcept { return precision_; }
  const SpdFactor& precision_factor() const noexcept { return factor_; }

  /// 1/2 (psi - m)^T R (psi - m).
  double penalty(const FieldVector& psi) const;
  FieldVector penalty_gradient(const FieldVector& psi) const;

  /// mean + R^{-1/2} u for a given standard normal vector u.
  FieldVector sample_from_noise(const Vector& u) const;

  /// Pointwise prior variances, diag(R^{-1}).
  Vector variances() const;

 private:
  Mesh2D mesh_;
  double gamma_, delta_;
  Anisotropy anisotropy_;
  FieldVector mean_;
  Matrix mass_, stiffness_, precision_;
  SpdFactor factor_;
};

/// Builds the prior; throws NonPositiveParameter on invalid
/// hyperparameters and DimensionMismatch on a wrong-length mean.
BilaplacianPrior build_prior(const Mesh2D& mesh, double gamma, double delta,
                             const Anisotropy& anisotropy,
                             const FieldVector& mean);

/// Draw from N(mean, R^{-1}).
FieldVector sample_prior(const BilaplacianPrior& prior, Rng& rng);

/// Leading eigenpairs of the prior covariance in the N-weighted inner
/// product: R^{-1} N phi_j = lambda_j^2 phi_j with phi_i^T N phi_j = delta_ij.
struct KlExpansion {
  Vector lambda;  // standard deviations lambda_j, descending
  Matrix modes;   // columns phi_j

  /// mean + sum_j lambda_j xi_j phi_j.
  FieldVector sample(const FieldVector& mean, const Vector& xi) const;
};

/// Throws RankOutOfRange unless 1 <= rank <= dim.
KlExpansion kl_expansion(const BilaplacianPrior& prior, Eigen::Index rank);

}  // namespace hessmc
