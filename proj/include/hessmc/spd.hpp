#pragma once

#include <Eigen/Dense>

#include <memory>
#include <variant>

namespace hessmc {

struct LowRankHessian;

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Nodal coefficients of a discretized field.
using FieldVector = Eigen::VectorXd;

enum class FactorKind { cholesky, eigen, lowrank };

/// Symmetric positive-definite operator M held through a square-root
/// factor S with M = S S^T.
///
/// Sampling conventions used throughout the library, with u standard normal:
///   apply_sqrt(u)            ~ N(0, M)
///   solve_sqrt_transpose(u)  ~ N(0, M^{-1})
/// Both use the same S, so M^{-1} (S u) = S^{-T} u exactly in exact
/// arithmetic. The samplers rely on this pairing.
///
/// Immutable after construction and cheap to copy (shared representation).
class SpdFactor {
 public:
  /// Identity of dimension n.
  static SpdFactor identity(Eigen::Index n);

  Eigen::Index dim() const noexcept { return n_; }
  FactorKind kind() const noexcept { return kind_; }

  Vector apply(const Vector& v) const;
  Vector solve(const Vector& v) const;
  Vector apply_sqrt(const Vector& v) const;
  Vector apply_sqrt_transpose(const Vector& v) const;
  Vector solve_sqrt(const Vector& v) const;
  Vector solve_sqrt_transpose(const Vector& v) const;

  /// v^T M^{-1} v.
  double inverse_quadratic(const Vector& v) const;

  double log_det() const noexcept { return log_det_; }

  Matrix dense() const;
  Matrix inverse_dense() const;

 private:
  struct Cholesky {
    Matrix lower;
  };
  struct Spectral {
    Matrix vectors;
    Vector values;
  };
  struct LowRank {
    std::shared_ptr<const SpdFactor> base;
    Matrix modes;   // n x r, orthonormal columns
    Vector values;  // r eigenvalues of the whitened misfit
  };
  using Rep = std::variant<Cholesky, Spectral, LowRank>;

  SpdFactor(FactorKind kind, Eigen::Index n, double log_det,
            std::shared_ptr<const Rep> rep)
      : kind_(kind), n_(n), log_det_(log_det), rep_(std::move(rep)) {}

  Vector apply_middle(const Vector& v, double power) const;

  FactorKind kind_;
  Eigen::Index n_;
  double log_det_;
  std::shared_ptr<const Rep> rep_;

  friend SpdFactor cholesky(const Matrix& m);
  friend SpdFactor eigen_factor(const Vector& values, const Matrix& vectors);
  friend struct LowRankHessian;
  friend LowRankHessian low_rank_hessian(const Matrix&, const SpdFactor&,
                                         double, bool);
};

/// Dense Cholesky factorization M = L L^T.
/// Throws NotPositiveDefinite carrying the failing pivot index, or
/// std::invalid_argument when M is not symmetric to 1e-12 relative.
SpdFactor cholesky(const Matrix& m);

struct SymmetricEigen {
  Vector values;   // descending
  Matrix vectors;  // orthonormal columns, matching values
};

/// Symmetric eigendecomposition with eigenvalues sorted descending.
/// Throws ConvergenceFailure when the QR iteration does not converge.
SymmetricEigen eigendecompose_sym(const Matrix& m);

/// SPD factor from an eigendecomposition; every value must be > 0.
SpdFactor eigen_factor(const Vector& values, const Matrix& vectors);

/// SPD factor of a symmetric matrix through its eigendecomposition.
SpdFactor eigen_factor(const Matrix& m);

/// Eigen factor after replacing eigenvalues below floor_ratio * max|lambda|
/// by that floor. Always succeeds for a nonzero finite matrix.
SpdFactor eigen_factor_floored(const Matrix& m, double floor_ratio);

/// Returns (M + M^T)/2 after checking the asymmetry is at most
/// tol * max|M_ij|; throws std::invalid_argument otherwise.
Matrix symmetrized(const Matrix& m, double tol = 1e-12);

/// Posterior Hessian  H = H_misfit + R  replaced by
///   S (V_r D_r V_r^T + I) S^T,   R = S S^T,
/// where (V_r, D_r) are the eigenpairs of S^{-1} H_misfit S^{-T} above the
/// truncation threshold. S^{-T} is the Cholesky-type factor of the prior
/// covariance, so this is the usual prior-preconditioned low-rank update.
struct LowRankHessian {
  SpdFactor prior;
  Matrix modes;
  Vector values;

  Eigen::Index rank() const noexcept { return values.size(); }

  /// The regularized Hessian as an SpdFactor (kind lowrank).
  SpdFactor factor() const;
};

inline constexpr double kDefaultRelativeTruncation = 1e-2;

/// Builds the low-rank regularized Hessian. Eigenvalues of the whitened
/// misfit are kept when lambda > threshold (absolute) or, with
/// `relative = true`, when lambda > threshold * lambda_max. Nonpositive
/// eigenvalues are always dropped, so the result is SPD.
LowRankHessian low_rank_hessian(const Matrix& h_misfit,
                                const SpdFactor& prior_precision,
                                double threshold, bool relative = false);

}  // namespace hessmc
