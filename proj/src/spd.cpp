#include "hessmc/spd.hpp"

#include "hessmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hessmc {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Locates the first nonpositive pivot of an unblocked Cholesky sweep.
std::size_t failing_pivot(const Matrix& m) {
  const Eigen::Index n = m.rows();
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double d = m(j, j) - l.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) return static_cast<std::size_t>(j);
    l(j, j) = std::sqrt(d);
    const Eigen::Index rest = n - j - 1;
    if (rest > 0) {
      l.col(j).tail(rest) =
          (m.col(j).tail(rest) -
           l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose()) /
          l(j, j);
    }
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

SpdFactor SpdFactor::identity(Eigen::Index n) {
  auto rep = std::make_shared<const Rep>(Cholesky{Matrix::Identity(n, n)});
  return SpdFactor(FactorKind::cholesky, n, 0.0, std::move(rep));
}

Vector SpdFactor::apply_middle(const Vector& v, double power) const {
  // W^power where W = I + V (sqrt(1+D) - 1) V^T; power is +1 or -1.
  const auto& lr = std::get<LowRank>(*rep_);
  if (lr.values.size() == 0) return v;
  Vector coeff = lr.modes.transpose() * v;
  Vector scale = (1.0 + lr.values.array()).sqrt().pow(power) - 1.0;
  return v + lr.modes * (scale.asDiagonal() * coeff);
}

Vector SpdFactor::apply_sqrt(const Vector& v) const {
  return std::visit(
      Overloaded{
          [&](const Cholesky& c) -> Vector {
            return c.lower.triangularView<Eigen::Lower>() * v;
          },
          [&](const Spectral& s) -> Vector {
            Vector w = s.vectors.transpose() * v;
            return s.vectors * (s.values.array().sqrt() * w.array()).matrix();
          },
          [&](const LowRank& lr) -> Vector {
            return lr.base->apply_sqrt(apply_middle(v, 1.0));
          }},
      *rep_);
}

Vector SpdFactor::apply_sqrt_transpose(const Vector& v) const {
  return std::visit(
      Overloaded{
          [&](const Cholesky& c) -> Vector {
            return c.lower.transpose().triangularView<Eigen::Upper>() * v;
          },
          [&](const Spectral&) -> Vector { return apply_sqrt(v); },
          [&](const LowRank& lr) -> Vector {
            return apply_middle(lr.base->apply_sqrt_transpose(v), 1.0);
          }},
      *rep_);
}

Vector SpdFactor::solve_sqrt(const Vector& v) const {
  return std::visit(
      Overloaded{
          [&](const Cholesky& c) -> Vector {
            return c.lower.triangularView<Eigen::Lower>().solve(v);
          },
          [&](const Spectral& s) -> Vector {
            Vector w = s.vectors.transpose() * v;
            return s.vectors * (w.array() / s.values.array().sqrt()).matrix();
          },
          [&](const LowRank& lr) -> Vector {
            return apply_middle(lr.base->solve_sqrt(v), -1.0);
          }},
      *rep_);
}

Vector SpdFactor::solve_sqrt_transpose(const Vector& v) const {
  return std::visit(
      Overloaded{
          [&](const Cholesky& c) -> Vector {
            return c.lower.transpose().triangularView<Eigen::Upper>().solve(v);
          },
          [&](const Spectral&) -> Vector { return solve_sqrt(v); },
          [&](const LowRank& lr) -> Vector {
            return lr.base->solve_sqrt_transpose(apply_middle(v, -1.0));
          }},
      *rep_);
}

Vector SpdFactor::apply(const Vector& v) const {
  if (v.size() != n_) throw DimensionMismatch(n_, v.size());
  return apply_sqrt(apply_sqrt_transpose(v));
}

Vector SpdFactor::solve(const Vector& v) const {
  if (v.size() != n_) throw DimensionMismatch(n_, v.size());
  return solve_sqrt_transpose(solve_sqrt(v));
}

double SpdFactor::inverse_quadratic(const Vector& v) const {
  return solve_sqrt(v).squaredNorm();
}

Matrix SpdFactor::dense() const {
  Matrix out(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) out.col(j) = apply(Vector::Unit(n_, j));
  return 0.5 * (out + out.transpose());
}

Matrix SpdFactor::inverse_dense() const {
  Matrix out(n_, n_);
  for (Eigen::Index j = 0; j < n_; ++j) out.col(j) = solve(Vector::Unit(n_, j));
  return 0.5 * (out + out.transpose());
}

Matrix symmetrized(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument("matrix must be square");
  }
  const double scale = std::max(m.cwiseAbs().maxCoeff(), 1e-300);
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol * scale) {
    throw std::invalid_argument("matrix is not symmetric (relative asymmetry " +
                                std::to_string(asym / scale) + ")");
  }
  return 0.5 * (m + m.transpose());
}

SpdFactor cholesky(const Matrix& m) {
  const Matrix a = symmetrized(m);
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) throw NotPositiveDefinite(failing_pivot(a));
  Matrix lower = llt.matrixL();
  const double log_det = 2.0 * lower.diagonal().array().log().sum();
  auto rep = std::make_shared<const SpdFactor::Rep>(
      SpdFactor::Cholesky{std::move(lower)});
  return SpdFactor(FactorKind::cholesky, a.rows(), log_det, std::move(rep));
}

SymmetricEigen eigendecompose_sym(const Matrix& m) {
  const Matrix a = symmetrized(m);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("symmetric eigensolver did not converge");
  }
  SymmetricEigen out;
  out.values = solver.eigenvalues().reverse();
  out.vectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

SpdFactor eigen_factor(const Vector& values, const Matrix& vectors) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!(values[i] > 0.0)) throw NotPositiveDefinite(static_cast<std::size_t>(i));
  }
  const double log_det = values.array().log().sum();
  auto rep = std::make_shared<const SpdFactor::Rep>(
      SpdFactor::Spectral{vectors, values});
  return SpdFactor(FactorKind::eigen, values.size(), log_det, std::move(rep));
}

SpdFactor eigen_factor(const Matrix& m) {
  auto eig = eigendecompose_sym(m);
  return eigen_factor(eig.values, eig.vectors);
}

SpdFactor eigen_factor_floored(const Matrix& m, double floor_ratio) {
  auto eig = eigendecompose_sym(m);
  double scale = eig.values.cwiseAbs().maxCoeff();
  if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
  const double floor = floor_ratio * scale;
  eig.values = eig.values.cwiseMax(floor);
  return eigen_factor(eig.values, eig.vectors);
}

SpdFactor LowRankHessian::factor() const {
  const double log_det =
      prior.log_det() + (1.0 + values.array()).log().sum();
  auto base = std::make_shared<const SpdFactor>(prior);
  auto rep = std::make_shared<const SpdFactor::Rep>(
      SpdFactor::LowRank{std::move(base), modes, values});
  return SpdFactor(FactorKind::lowrank, prior.dim(), log_det, std::move(rep));
}

LowRankHessian low_rank_hessian(const Matrix& h_misfit,
                                const SpdFactor& prior_precision,
                                double threshold, bool relative) {
  const Eigen::Index n = prior_precision.dim();
  if (h_misfit.rows() != n || h_misfit.cols() != n) {
    throw DimensionMismatch(static_cast<std::size_t>(n),
                            static_cast<std::size_t>(h_misfit.rows()));
  }
  const Matrix h = 0.5 * (h_misfit + h_misfit.transpose());

  // Whitened misfit  S^{-1} H S^{-T}.
  Matrix tmp(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    tmp.col(j) = prior_precision.solve_sqrt(h.col(j));
  }
  Matrix whitened(n, n);
  Matrix tmp_t = tmp.transpose();
  for (Eigen::Index j = 0; j < n; ++j) {
    whitened.col(j) = prior_precision.solve_sqrt(tmp_t.col(j));
  }

  LowRankHessian out{prior_precision, Matrix(n, 0), Vector(0)};
  if (n == 0 || whitened.cwiseAbs().maxCoeff() == 0.0) return out;

  const auto eig = eigendecompose_sym(0.5 * (whitened + whitened.transpose()));
  const double cut =
      std::max(0.0, relative ? threshold * eig.values[0] : threshold);
  Eigen::Index r = 0;
  while (r < n && eig.values[r] > cut && eig.values[r] > 0.0) ++r;
  out.modes = eig.vectors.leftCols(r);
  out.values = eig.values.head(r);
  return out;
}

}  // namespace hessmc
