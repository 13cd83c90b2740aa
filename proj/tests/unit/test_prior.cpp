#include "hessmc/errors.hpp"
#include "hessmc/mesh.hpp"
#include "hessmc/prior.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hessmc;

namespace {

BilaplacianPrior make_prior(double gamma = 1.0, double delta = 1.0,
                            Anisotropy an = {0.5, 1.0, 0.3}) {
  Mesh2D mesh(8, 4, 2.0, 1.0);
  return build_prior(mesh, gamma, delta, an, FieldVector::Constant(mesh.num_nodes(), 0.7));
}

}  // namespace

TEST(Mesh, NodeNumberingAndCoordinates) {
  Mesh2D mesh(4, 2, 8.0, 2.0);
  EXPECT_EQ(mesh.num_nodes(), 15);
  EXPECT_EQ(mesh.node(3, 1), 8);
  EXPECT_TRUE(mesh.coord(8).isApprox(Eigen::Vector2d(6.0, 1.0)));
  const auto nodes = mesh.cell_nodes(1, 1);
  EXPECT_EQ(nodes[0], 6);
  EXPECT_EQ(nodes[1], 7);
  EXPECT_EQ(nodes[2], 12);
  EXPECT_EQ(nodes[3], 11);
  EXPECT_EQ(mesh.nearest_node(5.9, 1.2), 8);
  EXPECT_FALSE(mesh.locate(8.5, 1.0).has_value());
}

TEST(Mesh, RejectsDegenerateInput) {
  EXPECT_THROW(Mesh2D(0, 2, 1.0, 1.0), std::exception);
  EXPECT_THROW(Mesh2D(2, 2, -1.0, 1.0), std::exception);
}

TEST(Assembly, MassIntegratesArea) {
  Mesh2D mesh(5, 3, 2.5, 1.5);
  const Matrix n = assemble_mass(mesh);
  EXPECT_NEAR(n.sum(), 2.5 * 1.5, 1e-12);
  EXPECT_LT((n - n.transpose()).norm(), 1e-14);
}

TEST(Assembly, StiffnessAnnihilatesConstantsWithoutReaction) {
  Mesh2D mesh(5, 3, 2.5, 1.5);
  const Matrix k = assemble_stiffness(mesh, 2.0, 0.0, anisotropy_matrix(0.3, 1.0, 0.4));
  EXPECT_LT((k * Vector::Ones(k.rows())).norm(), 1e-12);
  // Linear field x: energy = gamma * Psi_xx * area.
  Vector x(mesh.num_nodes());
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = mesh.coord(i).x();
  const Eigen::Matrix2d psi = anisotropy_matrix(0.3, 1.0, 0.4);
  EXPECT_NEAR(x.dot(k * x), 2.0 * psi(0, 0) * 2.5 * 1.5, 1e-10);
}

TEST(Anisotropy, EigenstructureAndValidation) {
  const Eigen::Matrix2d psi = anisotropy_matrix(0.2, 1.5, 0.7);
  const Eigen::Vector2d m(std::cos(0.7), std::sin(0.7));
  EXPECT_TRUE((psi * m).isApprox(1.5 * m, 1e-12));
  EXPECT_THROW(anisotropy_matrix(0.0, 1.0, 0.0), NonPositiveParameter);
}

TEST(Prior, PrecisionIsSpdAndGradientVanishesAtMean) {
  Mesh2D mesh(1, 1, 1.0, 1.0);
  const auto p = build_prior(mesh, 1.0, 1.0, {}, FieldVector::Zero(4));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(p.precision());
  EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);

  const auto q = make_prior();
  EXPECT_LT(q.penalty_gradient(q.mean()).norm(), 1e-12);
  EXPECT_DOUBLE_EQ(q.penalty(q.mean()), 0.0);
}

TEST(Prior, PrecisionIsKNinvK) {
  const auto p = make_prior(0.8, 1.3);
  const Matrix r = p.stiffness() * p.mass().ldlt().solve(p.stiffness());
  EXPECT_LT((p.precision() - r).norm(), 1e-9 * r.norm());
}

TEST(Prior, ValidatesHyperparameters) {
  Mesh2D mesh(2, 2, 1.0, 1.0);
  const FieldVector mean = FieldVector::Zero(9);
  EXPECT_THROW(build_prior(mesh, -1.0, 1.0, {}, mean), NonPositiveParameter);
  EXPECT_THROW(build_prior(mesh, 1.0, 0.0, {}, mean), NonPositiveParameter);
  EXPECT_THROW(build_prior(mesh, 1.0, 1.0, {}, FieldVector::Zero(3)), DimensionMismatch);
}

TEST(Prior, ZeroNoiseGivesMeanAndSeedsAreDeterministic) {
  const auto p = make_prior();
  EXPECT_EQ(p.sample_from_noise(Vector::Zero(p.dim())), p.mean());
  Rng a(42), b(42);
  EXPECT_EQ(sample_prior(p, a), sample_prior(p, b));
}

TEST(Prior, SampleMeanWithinClt) {
  const auto p = make_prior();
  Rng rng(3);
  const int n = 20000;
  Vector acc = Vector::Zero(p.dim());
  for (int k = 0; k < n; ++k) acc += sample_prior(p, rng);
  acc /= n;
  const Vector se = (p.variances() / n).cwiseSqrt();
  int inside = 0;
  for (Eigen::Index i = 0; i < p.dim(); ++i) {
    if (std::abs(acc[i] - p.mean()[i]) <= 3.0 * se[i]) ++inside;
  }
  EXPECT_GE(inside, static_cast<int>(std::ceil(0.99 * p.dim())) - 1);
}

TEST(KlExpansion, ModesAreMassOrthonormalAndSolveEigenproblem) {
  const auto p = make_prior();
  const auto kl = kl_expansion(p, 10);
  const Matrix g = kl.modes.transpose() * p.mass() * kl.modes;
  EXPECT_LT((g - Matrix::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-8);
  const Matrix cov = p.precision().inverse();
  for (Eigen::Index j = 0; j < 10; ++j) {
    const Vector lhs = cov * p.mass() * kl.modes.col(j);
    const Vector rhs = kl.lambda[j] * kl.lambda[j] * kl.modes.col(j);
    const Vector diff = lhs - rhs;
    EXPECT_LT(std::sqrt(diff.dot(p.mass() * diff)), 1e-8 * kl.lambda[j] * kl.lambda[j]);
  }
  for (Eigen::Index j = 1; j < 10; ++j) EXPECT_GE(kl.lambda[j - 1], kl.lambda[j]);
}

TEST(KlExpansion, FullRankIsComplete) {
  const auto p = make_prior();
  const auto kl = kl_expansion(p, p.dim());
  const Matrix recon =
      kl.modes * kl.lambda.array().square().matrix().asDiagonal() *
      kl.modes.transpose() * p.mass();
  const Matrix target = p.precision().inverse() * p.mass();
  EXPECT_LT((recon - target).cwiseAbs().maxCoeff(), 1e-6 * target.cwiseAbs().maxCoeff());
}

TEST(KlExpansion, TruncatedVarianceBelowFull) {
  const auto p = make_prior();
  const auto kl = kl_expansion(p, 12);
  const Vector var =
      (kl.modes.array().square().matrix() * kl.lambda.array().square().matrix());
  const Vector full = p.variances();
  for (Eigen::Index i = 0; i < var.size(); ++i) EXPECT_LE(var[i], full[i] * (1 + 1e-10));
  EXPECT_EQ(kl.sample(p.mean(), Vector::Zero(12)), p.mean());
}

TEST(KlExpansion, RankValidation) {
  const auto p = make_prior();
  EXPECT_THROW(kl_expansion(p, 0), RankOutOfRange);
  EXPECT_THROW(kl_expansion(p, p.dim() + 1), RankOutOfRange);
}

TEST(KlExpansion, LargerDeltaShrinksEveryEigenvalue) {
  const auto a = kl_expansion(make_prior(1.0, 1.0), 45);
  const auto b = kl_expansion(make_prior(1.0, 2.0), 45);
  for (Eigen::Index j = 0; j < 45; ++j) EXPECT_LT(b.lambda[j], a.lambda[j]);
}

// With zero-flux boundaries the constant mode satisfies K 1 = delta N 1, so
// its eigenvalue 1/delta^2 does not depend on gamma. Every other eigenvalue
// decreases strictly when gamma doubles.
TEST(KlExpansion, LargerGammaShrinksAllButTheConstantMode) {
  const auto a = kl_expansion(make_prior(1.0, 1.0), 45);
  const auto b = kl_expansion(make_prior(2.0, 1.0), 45);
  EXPECT_NEAR(a.lambda[0], 1.0, 1e-10);
  EXPECT_NEAR(b.lambda[0], 1.0, 1e-10);
  for (Eigen::Index j = 1; j < 45; ++j) EXPECT_LT(b.lambda[j], a.lambda[j]);
}

TEST(Prior, PenaltyDifferencesAreConventionFree) {
  const auto p = make_prior();
  Rng rng(8);
  const Vector x = sample_prior(p, rng), y = sample_prior(p, rng);
  const Vector dx = x - p.mean(), dy = y - p.mean();
  EXPECT_NEAR(p.penalty(x) - p.penalty(y),
              0.5 * (dx.dot(p.precision() * dx) - dy.dot(p.precision() * dy)), 1e-9);
}
