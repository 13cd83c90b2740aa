#include "hessmc/prior.hpp"

#include "hessmc/errors.hpp"

#include <cmath>

namespace hessmc {

Eigen::Matrix2d anisotropy_matrix(double a, double b, double beta) {
  if (!(a > 0.0)) throw NonPositiveParameter("a");
  if (!(b > 0.0)) throw NonPositiveParameter("b");
  const double s = std::sin(beta);
  const double c = std::cos(beta);
  Eigen::Matrix2d psi;
  psi << a * s * s + b * c * c, (b - a) * s * c,  //
      (b - a) * s * c, b * s * s + a * c * c;
  return psi;
}

namespace {

template <class Integrand>
Matrix assemble(const Mesh2D& mesh, Integrand&& integrand) {
  const Eigen::Index n = mesh.num_nodes();
  Matrix out = Matrix::Zero(n, n);
  const auto quad = cell_quadrature(mesh);
  Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
  for (const auto& q : quad) {
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) local(a, b) += q.weight * integrand(q, a, b);
    }
  }
  for (int cy = 0; cy < mesh.ny(); ++cy) {
    for (int cx = 0; cx < mesh.nx(); ++cx) {
      const auto nodes = mesh.cell_nodes(cx, cy);
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) out(nodes[a], nodes[b]) += local(a, b);
      }
    }
  }
  return out;
}

}  // namespace

Matrix assemble_mass(const Mesh2D& mesh) {
  return assemble(mesh, [](const QuadPoint& q, int a, int b) {
    return q.phi[a] * q.phi[b];
  });
}

Matrix assemble_stiffness(const Mesh2D& mesh, double gamma, double delta,
                          const Eigen::Matrix2d& psi) {
  return assemble(mesh, [&](const QuadPoint& q, int a, int b) {
    return gamma * q.grad[b].dot(psi * q.grad[a]) + delta * q.phi[a] * q.phi[b];
  });
}

namespace {

Matrix prior_precision(const Matrix& mass, const Matrix& stiffness) {
  Eigen::LLT<Matrix> mass_llt(mass);
  Matrix r = stiffness.transpose() * mass_llt.solve(stiffness);
  return 0.5 * (r + r.transpose());
}

}  // namespace

BilaplacianPrior::BilaplacianPrior(Mesh2D mesh, double gamma, double delta,
                                   Anisotropy anisotropy, FieldVector mean)
    : mesh_(mesh),
      gamma_(gamma),
      delta_(delta),
      anisotropy_(anisotropy),
      mean_(std::move(mean)),
      mass_(assemble_mass(mesh_)),
      stiffness_(assemble_stiffness(
          mesh_, gamma_, delta_,
          anisotropy_matrix(anisotropy.a, anisotropy.b, anisotropy.beta))),
      precision_(prior_precision(mass_, stiffness_)),
      factor_(eigen_factor(precision_)) {}

double BilaplacianPrior::penalty(const FieldVector& psi) const {
  const Vector d = psi - mean_;
  return 0.5 * d.dot(precision_ * d);
}

FieldVector BilaplacianPrior::penalty_gradient(const FieldVector& psi) const {
  return precision_ * (psi - mean_);
}

FieldVector BilaplacianPrior::sample_from_noise(const Vector& u) const {
  return mean_ + factor_.solve_sqrt_transpose(u);
}

Vector BilaplacianPrior::variances() const {
  return factor_.inverse_dense().diagonal();
}

BilaplacianPrior build_prior(const Mesh2D& mesh, double gamma, double delta,
                             const Anisotropy& anisotropy,
                             const FieldVector& mean) {
  if (!(gamma >= 0.0)) throw NonPositiveParameter("gamma");
  if (!(delta > 0.0)) throw NonPositiveParameter("delta");
  if (mean.size() != mesh.num_nodes()) {
    throw DimensionMismatch(static_cast<std::size_t>(mesh.num_nodes()),
                            static_cast<std::size_t>(mean.size()));
  }
  return BilaplacianPrior(mesh, gamma, delta, anisotropy, mean);
}

FieldVector sample_prior(const BilaplacianPrior& prior, Rng& rng) {
  return prior.sample_from_noise(standard_normal(rng, prior.dim()));
}

FieldVector KlExpansion::sample(const FieldVector& mean, const Vector& xi) const {
  if (xi.size() != lambda.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(lambda.size()),
                            static_cast<std::size_t>(xi.size()));
  }
  return mean + modes * (lambda.array() * xi.array()).matrix();
}

KlExpansion kl_expansion(const BilaplacianPrior& prior, Eigen::Index rank) {
  const Eigen::Index n = prior.dim();
  if (rank < 1 || rank > n) {
    throw RankOutOfRange(static_cast<std::size_t>(rank),
                         static_cast<std::size_t>(n));
  }
  // R phi = mu N phi with phi^T N phi = 1; the covariance eigenvalue is 1/mu.
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(prior.precision(),
                                                          prior.mass());
  if (solver.info() != Eigen::Success) {
    throw ConvergenceFailure("generalized eigensolver did not converge");
  }
  KlExpansion out;
  out.lambda = solver.eigenvalues().head(rank).cwiseInverse().cwiseSqrt();
  out.modes = solver.eigenvectors().leftCols(rank);
  return out;
}

}  // namespace hessmc
