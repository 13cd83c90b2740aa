#include "fixtures.hpp"

#include "hessmc/diagnostics.hpp"
#include "hessmc/errors.hpp"
#include "hessmc/samplers.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <deque>

using namespace hessmc;
using namespace hessmc::testing;

namespace {

// J = const everywhere: leapfrog reduces to free drift.
class FlatTarget final : public TargetDensity {
 public:
  explicit FlatTarget(Eigen::Index n) : n_(n) {}
  Eigen::Index dim() const override { return n_; }
  std::string name() const override { return "flat"; }
  Evaluation evaluate(const FieldVector& psi) const override {
    return {3.0, FieldVector::Zero(psi.size())};
  }
  SpdFactor map_preconditioner(const FieldVector&) const override {
    return SpdFactor::identity(n_);
  }

 private:
  Eigen::Index n_;
};

// Plays back fixed uniforms and (optionally) zero normals.
class ScriptedStream final : public NoiseStream {
 public:
  explicit ScriptedStream(std::uint64_t seed) : NoiseStream(seed) {}
  Vector normal(Eigen::Index n) override {
    if (zero_normals) return Vector::Zero(n);
    return NoiseStream::normal(n);
  }
  double uniform() override {
    if (uniforms.empty()) return NoiseStream::uniform();
    const double u = uniforms.front();
    uniforms.pop_front();
    return u;
  }
  bool zero_normals = false;
  std::deque<double> uniforms;
};

struct Recorded {
  std::vector<FieldVector> current, proposal;
  std::vector<double> alpha, J0, J1;
  std::vector<bool> accepted;
};

RunOptions recorder(Recorded& rec, NoiseStream* noise = nullptr) {
  RunOptions run;
  run.noise = noise;
  run.observer = [&rec](const StepRecord& r) {
    rec.current.push_back(*r.current);
    rec.proposal.push_back(*r.proposal);
    rec.alpha.push_back(r.log_ratio);
    rec.J0.push_back(r.J_current);
    rec.J1.push_back(r.J_proposal);
    rec.accepted.push_back(r.accepted);
  };
  return run;
}

GaussianTarget correlated_gaussian(Eigen::Index n, std::uint64_t seed) {
  Rng rng(seed);
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) a.col(j) = standard_normal(rng, n);
  Matrix p = a * a.transpose() / n + 0.5 * Matrix::Identity(n, n);
  p = 0.5 * (p + p.transpose());
  return GaussianTarget(standard_normal(rng, n), cholesky(p));
}

SamplerConfig config(Method m, int n, std::uint64_t seed = 1) {
  SamplerConfig c;
  c.method = m;
  c.n_samples = n;
  c.seed = seed;
  return c;
}

double sample_variance(const Vector& x) {
  return (x.array() - x.mean()).square().sum() / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST(SamplerConfig, ValidationAndMethodNames) {
  SamplerConfig c;
  c.tau = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.dt = 0.0;
  EXPECT_THROW(c.validate(), NonPositiveParameter);
  c = {};
  c.leapfrog_steps = 0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_EQ(parse_method("SN-MAP"), Method::sn_map);
  EXPECT_EQ(parse_method("mh_mcmc"), Method::mh);
  EXPECT_EQ(parse_method(to_string(Method::h_hmc)), Method::h_hmc);
  EXPECT_THROW(parse_method("nuts"), std::invalid_argument);
}

TEST(RunSampler, MissingInputsAreReported) {
  const auto t = GaussianTarget::scalar(0.5, 2.0);
  const FieldVector x0 = FieldVector::Zero(1);
  EXPECT_THROW(run_sampler(t, x0, config(Method::sn_map, 10), {}), std::invalid_argument);
  SamplerInputs in;
  in.h_map = t.precision();
  EXPECT_THROW(run_sampler(t, x0, config(Method::is_map, 10), in), std::invalid_argument);
  in.psi_map = t.mean();
  EXPECT_EQ(run_sampler(t, x0, config(Method::is_map, 10), in).size(), 10);
}

// ------------------------------------------------------------------ MH

TEST(MhMcmc, SymmetricProposalHasZeroCorrection) {
  const auto t = correlated_gaussian(3, 2);
  Recorded rec;
  auto c = config(Method::mh, 200);
  c.dt = 0.5;
  mh_mcmc(t, FieldVector::Zero(3), c, recorder(rec));
  for (std::size_t k = 0; k < rec.alpha.size(); ++k) {
    EXPECT_EQ(rec.alpha[k], rec.J0[k] - rec.J1[k]);
  }
}

TEST(MhMcmc, VanishingStepIsAlwaysAccepted) {
  const auto t = correlated_gaussian(4, 3);
  auto c = config(Method::mh, 1000);
  c.dt = 1e-8;
  EXPECT_GE(mh_mcmc(t, FieldVector::Zero(4), c).acceptance_rate, 0.999);
}

TEST(MhMcmc, ScalarGaussianMeanWithinThreeStandardErrors) {
  const auto t = GaussianTarget::scalar(0.5, 2.0);
  auto c = config(Method::mh, 2000, 7);
  c.dt = 1.0;
  const Chain ch = mh_mcmc(t, FieldVector::Constant(1, 0.5), c);
  const ChainStats s = iact_ess_se(ch.samples.col(0));
  EXPECT_LT(std::abs(s.mean - 0.5), 3.0 * s.se_sqrt);
}

// ----------------------------------------------------------------- HMC

TEST(Hmc, FreeParticleDriftsWithUnitAcceptance) {
  const FlatTarget t(3);
  Matrix m(3, 3);
  m << 2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0;
  const SpdFactor mass = cholesky(m);
  auto c = config(Method::hmc, 50);
  c.dt = 0.4;
  Recorded rec;
  NoiseStream replay(c.seed);
  const Chain ch = hmc(t, FieldVector::Zero(3), c, mass, recorder(rec));
  EXPECT_EQ(ch.acceptance_rate, 1.0);
  for (std::size_t k = 0; k < rec.alpha.size(); ++k) {
    EXPECT_EQ(rec.alpha[k], 0.0);
    const Vector p = mass.apply_sqrt(replay.normal(3));
    replay.uniform();
    EXPECT_LT((rec.proposal[k] - rec.current[k] - c.dt * mass.solve(p)).norm(), 1e-12);
  }
}

TEST(Leapfrog, ReversibleUnderMomentumFlip) {
  const auto t = correlated_gaussian(5, 4);
  const SpdFactor mass = eigen_factor(t.precision().dense());
  Rng rng(5);
  const FieldVector x = standard_normal(rng, 5);
  const FieldVector p = mass.apply_sqrt(standard_normal(rng, 5));
  const auto fwd = leapfrog(t, x, p, t.gradient(x), 0.2, 15, mass);
  const auto back = leapfrog(t, fwd.psi, -fwd.momentum, fwd.gradient, 0.2, 15, mass);
  EXPECT_LT((back.psi - x).norm(), 1e-10);
  EXPECT_LT((back.momentum + p).norm(), 1e-10);
}

// For J = x^2/2 and unit mass, leapfrog conserves the modified energy
// p^2/2 + (1 - dt^2/4) x^2/2 exactly, so dH = dt^2/8 (x1^2 - x0^2). At
// dt = 0.1 a standard normal draw gives |dH| around 1e-3 on average, with a
// worst case near 2.5e-3 times the energy.
TEST(Leapfrog, EnergyErrorIsSecondOrder) {
  const auto t = GaussianTarget::scalar(0.0, 1.0);
  const SpdFactor mass = SpdFactor::identity(1);
  Rng rng(6);
  double e1 = 0.0, e2 = 0.0;
  for (int k = 0; k < 100; ++k) {
    const FieldVector x = standard_normal(rng, 1);
    const FieldVector p = standard_normal(rng, 1);
    const double h0 = hamiltonian(t.value(x), p, mass);
    const auto a = leapfrog(t, x, p, t.gradient(x), 0.1, 10, mass);
    const auto b = leapfrog(t, x, p, t.gradient(x), 0.05, 20, mass);
    const double da = hamiltonian(a.J, a.momentum, mass) - h0;
    EXPECT_NEAR(da, 0.01 / 8.0 * (a.psi[0] * a.psi[0] - x[0] * x[0]), 1e-13);
    EXPECT_LE(std::abs(da), 0.0025 * h0 + 1e-15);
    e1 += std::abs(da);
    e2 += std::abs(hamiltonian(b.J, b.momentum, mass) - h0);
  }
  EXPECT_LE(e2 / 100, 1e-3);
  EXPECT_GT(e1 / e2, 3.2);
  EXPECT_LT(e1 / e2, 4.8);
}

TEST(HHmc, ExactPrecisionMassAcceptsMostProposals) {
  const auto t = correlated_gaussian(10, 7);
  auto c = config(Method::h_hmc, 2000);
  c.dt = 0.3;
  EXPECT_GE(h_hmc(t, t.mean(), c, t.precision()).acceptance_rate, 0.9);
}

// ---------------------------------------------------------------- MALA

TEST(Mala, ZeroGradientKeepsProposalMeanAtCurrentPoint) {
  const auto t = correlated_gaussian(3, 8);
  ScriptedStream noise(1);
  noise.zero_normals = true;
  Recorded rec;
  mala(t, t.mean(), config(Method::mala, 3), t.precision(), recorder(rec, &noise));
  for (const auto& z : rec.proposal) EXPECT_LT((z - t.mean()).norm(), 1e-14);
}

TEST(Mala, ExpandedRatioMatchesProposalDensityDifference) {
  const auto t = correlated_gaussian(4, 9);
  const SpdFactor metric = eigen_factor(2.0 * t.precision().dense());
  auto c = config(Method::mala, 100);
  c.tau = 0.7;
  Recorded rec;
  mala(t, FieldVector::Zero(4), c, metric, recorder(rec));
  for (std::size_t k = 0; k < rec.alpha.size(); ++k) {
    const FieldVector& x0 = rec.current[k];
    const FieldVector& x1 = rec.proposal[k];
    const double direct = rec.J0[k] - rec.J1[k] +
                          mala_log_proposal(x0, x1, t.gradient(x1), c.tau, metric) -
                          mala_log_proposal(x1, x0, t.gradient(x0), c.tau, metric);
    EXPECT_NEAR(rec.alpha[k], direct, 1e-10 * std::max(1.0, std::abs(direct)));
  }
}

// With B = covariance the proposal is N(psi - tau (psi - m), 2 tau Sigma).
// At tau = 1 it is the state-free N(m, 2 Sigma), which is not the target, so
// high acceptance needs a small tau.
TEST(Mala, CovariancePreconditioner) {
  const auto t = correlated_gaussian(6, 10);
  auto c = config(Method::mala, 1000);
  c.tau = 1.0;
  Recorded rec;
  NoiseStream replay(c.seed);
  mala(t, FieldVector::Zero(6), c, t.precision(), recorder(rec));
  for (const auto& z : rec.proposal) {
    const Vector expect =
        t.mean() + std::sqrt(2.0) * t.precision().solve_sqrt_transpose(replay.normal(6));
    replay.uniform();
    EXPECT_LT((z - expect).norm(), 1e-10);
  }
  c.tau = 0.05;
  EXPECT_GE(mala(t, FieldVector::Zero(6), c, t.precision()).acceptance_rate, 0.97);
}

// -------------------------------------------------------------- SN-MAP

TEST(SnMap, ExactPrecisionGivesZeroRatio) {
  for (Eigen::Index n : {1, 10, 30}) {
    const auto t = correlated_gaussian(n, 11 + static_cast<std::uint64_t>(n));
    Recorded rec;
    const Chain ch = sn_map(t, FieldVector::Zero(n), config(Method::sn_map, 500),
                            t.precision(), recorder(rec));
    EXPECT_EQ(ch.acceptance_rate, 1.0);
    for (double a : rec.alpha) EXPECT_LE(std::abs(a), 1e-8);
  }
}

TEST(SnMap, TinyLearningRateLeavesNoiseDominant) {
  const auto t = correlated_gaussian(5, 12);
  auto c = config(Method::sn_map, 500);
  c.random_learning_rate = true;
  c.learning_rate_max = 1e-6;
  Recorded rec;
  sn_map(t, FieldVector::Constant(5, 2.0), c, t.precision(), recorder(rec));
  double drift = 0.0, step = 0.0;
  for (std::size_t k = 0; k < rec.current.size(); ++k) {
    drift += (1e-6 * t.precision().solve(t.gradient(rec.current[k]))).norm();
    step += (rec.proposal[k] - rec.current[k]).norm();
  }
  EXPECT_LT(drift, 0.01 * step);
}

TEST(SnMap, AcceptanceFallsAsLogNormalWidens) {
  double last = 1.1;
  for (double v : {0.01, 0.05, 0.1}) {
    const LogNormalTarget t(FieldVector::Zero(1), Matrix::Constant(1, 1, v));
    const FieldVector map = t.map_point();
    const double rate =
        sn_map(t, map, config(Method::sn_map, 4000, 3), t.map_preconditioner(map))
            .acceptance_rate;
    EXPECT_LT(rate, last) << "variance " << v;
    last = rate;
  }
}

// The three drift-plus-noise updates coincide under matched draws when
// gamma = tau = 1/2 and dt = 1: all propose N(psi - H^{-1} g / 2, H^{-1}).
TEST(Equivalence, MalaHhmcAndSnMapShareProposals) {
  const LogNormalTarget t(FieldVector::Constant(3, 0.2),
                          0.1 * Matrix::Identity(3, 3) + Matrix::Constant(3, 3, 0.05));
  const FieldVector map = t.map_point();
  const SpdFactor h = t.map_preconditioner(map);

  auto cm = config(Method::mala, 300, 21);
  cm.tau = 0.5;
  auto ch = config(Method::h_hmc, 300, 21);
  ch.dt = 1.0;
  Recorded rm, rh, rs;
  mala(t, map, cm, h, recorder(rm));
  h_hmc(t, map, ch, h, recorder(rh));

  // SN-MAP draws its learning rate before the normal vector: answer those
  // calls with 1 - 1/2 and forward the rest from a MALA-ordered stream.
  class Forward final : public NoiseStream {
   public:
    explicit Forward(std::uint64_t seed) : NoiseStream(0), src_(seed) {}
    Vector normal(Eigen::Index n) override { return src_.normal(n); }
    double uniform() override {
      if ((calls_++ % 2) == 0) return 0.5;
      return src_.uniform();
    }

   private:
    NoiseStream src_;
    long calls_ = 0;
  };
  Forward fs(21);
  auto cs = config(Method::sn_map, 300, 21);
  cs.random_learning_rate = true;
  cs.learning_rate_max = 1.0;
  sn_map(t, map, cs, h, recorder(rs, &fs));

  ASSERT_EQ(rm.proposal.size(), rh.proposal.size());
  ASSERT_EQ(rm.proposal.size(), rs.proposal.size());
  for (std::size_t k = 0; k < rm.proposal.size(); ++k) {
    EXPECT_LT((rm.proposal[k] - rh.proposal[k]).norm(), 1e-10);
    EXPECT_LT((rm.proposal[k] - rs.proposal[k]).norm(), 1e-10);
    if (std::isinf(rm.alpha[k])) {
      EXPECT_EQ(rm.alpha[k], rh.alpha[k]);
      EXPECT_EQ(rm.alpha[k], rs.alpha[k]);
      continue;
    }
    EXPECT_NEAR(rm.alpha[k], rh.alpha[k], 1e-10);
    EXPECT_NEAR(rm.alpha[k], rs.alpha[k], 1e-10);
    EXPECT_EQ(rm.accepted[k], rh.accepted[k]);
  }
}

TEST(Equivalence, RatioFormulasAgreeAtMatchedParameters) {
  const auto t = correlated_gaussian(4, 13);
  const SpdFactor h = eigen_factor(1.3 * t.precision().dense());
  Rng rng(14);
  for (int k = 0; k < 20; ++k) {
    const FieldVector a = standard_normal(rng, 4), b = standard_normal(rng, 4);
    EXPECT_NEAR(mala_log_ratio(t.value(a), t.value(b), a, b, t.gradient(a),
                               t.gradient(b), 0.5, h),
                sn_map_log_ratio(t.value(a), t.value(b), a, b, t.gradient(a),
                                 t.gradient(b), 0.5, h),
                1e-12);
  }
}

// ------------------------------------------------------------- SN-MCMC

TEST(SnMcmc, GaussianMatchesSnMapExactly) {
  const auto t = correlated_gaussian(4, 15);
  const auto c = config(Method::sn_mcmc, 300, 4);
  const Chain a = sn_mcmc(t, FieldVector::Zero(4), c);
  // Same square root as the local Hessian factor.
  const Chain b = sn_map(t, FieldVector::Zero(4), c, eigen_factor(t.precision().dense()));
  EXPECT_EQ(a.acceptance_rate, 1.0);
  EXPECT_LT((a.samples - b.samples).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SnMcmc, ProposalMeanIsNewtonStep) {
  const LogNormalTarget t(FieldVector::Constant(1, 0.5), Matrix::Constant(1, 1, 2.0));
  // J'(x) = (r/2 + 1)/x, J''(x) = (1/2 - r/2 - 1)/x^2 with r = log x - 1/2.
  const double x = 0.3;
  const double r = std::log(x) - 0.5;
  const double d1 = (0.5 * r + 1.0) / x;
  const double d2 = (0.5 - 0.5 * r - 1.0) / (x * x);
  ASSERT_GT(d2, 0.0);
  ScriptedStream noise(1);
  noise.zero_normals = true;
  Recorded rec;
  sn_mcmc(t, FieldVector::Constant(1, x), config(Method::sn_mcmc, 1), recorder(rec, &noise));
  EXPECT_NEAR(rec.proposal[0][0], x - d1 / d2, 1e-12);
}

TEST(SnMcmc, IndefiniteCurvatureIsFloored) {
  const LogNormalTarget t(FieldVector::Constant(1, 0.5), Matrix::Constant(1, 1, 2.0));
  const FieldVector x = FieldVector::Constant(1, 5.0);
  const double h = t.hessian(x, HessianMode::analytic)(0, 0);
  ASSERT_LT(h, 0.0);
  const SpdFactor f = local_hessian(t, x);
  EXPECT_GT(f.dense()(0, 0), 0.0);
  EXPECT_NEAR(f.dense()(0, 0), kLocalHessianFloor * std::abs(h), 1e-18);
  const Chain ch = sn_mcmc(t, x, config(Method::sn_mcmc, 200));
  EXPECT_TRUE((ch.samples.array() > 0.0).all());
}

TEST(SnMcmc, PosteriorHasNoLocalHessian) {
  const auto problem = small_problem();
  const auto plan = small_plan();
  const auto prior = small_prior(problem.mesh);
  const Vector y = observe(solve_forward(problem, prior->mean()), plan);
  const PosteriorTarget t(prior, problem, plan, y, 1e6);
  EXPECT_THROW(sn_mcmc(t, prior->mean(), config(Method::sn_mcmc, 5)), HessianUnavailable);
}

// -------------------------------------------------------------- IS-MAP

TEST(IsMap, ProposalEqualToTargetAcceptsEverything) {
  const auto t = correlated_gaussian(5, 16);
  Recorded rec;
  const Chain ch = is_map(t, t.mean(), config(Method::is_map, 500), t.precision(),
                          recorder(rec));
  EXPECT_EQ(ch.acceptance_rate, 1.0);
  for (double a : rec.alpha) EXPECT_LE(std::abs(a), 1e-10);
}

TEST(IsMap, WiderTargetStillConvergesAndAcceptedDrawsAreIndependent) {
  // Target variance 2, proposal variance 1; moments by trapezoid quadrature.
  const auto t = GaussianTarget::scalar(0.5, 2.0);
  double z = 0.0, m1 = 0.0, m2 = 0.0;
  for (double x = -20.0; x <= 21.0; x += 1e-3) {
    const double w = std::exp(-t.value(FieldVector::Constant(1, x)));
    z += w;
    m1 += w * x;
    m2 += w * x * x;
  }
  const double mean = m1 / z, var = m2 / z - mean * mean;

  Recorded rec;
  const Chain ch = is_map(t, FieldVector::Constant(1, 0.5), config(Method::is_map, 50000, 5),
                          SpdFactor::identity(1), recorder(rec));
  EXPECT_LT(ch.acceptance_rate, 1.0);
  const Vector x = ch.samples.col(0);
  const ChainStats s = iact_ess_se(x);
  EXPECT_LT(std::abs(s.mean - mean), 4.0 * s.se_sqrt);
  EXPECT_NEAR(sample_variance(x), var, 0.1 * var);

  std::vector<double> acc;
  for (std::size_t k = 0; k < rec.proposal.size(); ++k) {
    if (rec.accepted[k]) acc.push_back(rec.proposal[k][0]);
  }
  const Vector a = Eigen::Map<const Vector>(acc.data(), static_cast<Eigen::Index>(acc.size()));
  EXPECT_LT(std::abs(autocorrelation(a, 1)[0]), 3.0 / std::sqrt(a.size()));
}

// ------------------------------------------------------ chain invariants

class ExactnessTest : public ::testing::TestWithParam<Method> {};

TEST_P(ExactnessTest, ScalarGaussianMomentsAt50kSteps) {
  const auto t = GaussianTarget::scalar(0.5, 2.0);
  auto c = config(GetParam(), 50000, 17);
  c.dt = GetParam() == Method::mh ? 2.5 : 1.0;
  c.tau = 0.5;
  if (GetParam() == Method::hmc) c.leapfrog_steps = 3;
  SamplerInputs in;
  in.h_map = t.precision();
  in.psi_map = t.mean();
  const Chain ch = run_sampler(t, FieldVector::Constant(1, -1.0), c, in);
  const Vector x = ch.samples.col(0);
  const ChainStats s = iact_ess_se(x);
  EXPECT_LT(std::abs(s.mean - 0.5), 4.0 * s.se_sqrt);
  EXPECT_NEAR(sample_variance(x), 2.0, 0.2);
}

namespace hessmc {
void PrintTo(Method m, std::ostream* os) { *os << to_string(m); }
}  // namespace hessmc

INSTANTIATE_TEST_SUITE_P(AllMethods, ExactnessTest,
                         ::testing::Values(Method::mh, Method::hmc, Method::h_hmc,
                                           Method::mala, Method::sn_map,
                                           Method::sn_mcmc, Method::is_map),
                         [](const auto& info) { return to_string(info.param); });

TEST(Chain, DeterministicRejectionAndThinning) {
  const auto t = correlated_gaussian(3, 18);
  auto c = config(Method::mh, 400, 9);
  c.dt = 1.5;
  const Chain a = mh_mcmc(t, FieldVector::Zero(3), c);
  const Chain b = mh_mcmc(t, FieldVector::Zero(3), c);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_EQ(a.accepted, b.accepted);
  EXPECT_EQ(a.log_j, b.log_j);

  double flags = 0.0;
  for (char f : a.accepted) flags += f;
  EXPECT_DOUBLE_EQ(a.acceptance_rate, flags / static_cast<double>(a.accepted.size()));
  ASSERT_LT(a.acceptance_rate, 0.9);
  for (Eigen::Index k = 1; k < a.size(); ++k) {
    if (!a.accepted[static_cast<std::size_t>(k)]) {
      EXPECT_TRUE((a.samples.row(k).array() == a.samples.row(k - 1).array()).all());
    }
  }

  auto ct = c;
  ct.thinning = 4;
  ct.n_samples = 100;
  const Chain th = mh_mcmc(t, FieldVector::Zero(3), ct);
  EXPECT_EQ(th.size(), 100);
  EXPECT_EQ(th.accepted.size(), 400u);
  EXPECT_DOUBLE_EQ(th.acceptance_rate, a.acceptance_rate);
  for (Eigen::Index k = 0; k < th.size(); ++k) {
    EXPECT_EQ(th.kept_steps[static_cast<std::size_t>(k)], 4 * k + 3);
    EXPECT_EQ(th.samples.row(k), a.samples.row(4 * k + 3));
  }
}

TEST(Chain, LogNormalOutOfSupportProposalsAreRejected) {
  const LogNormalTarget t(FieldVector::Zero(2), 0.5 * Matrix::Identity(2, 2), 0.0);
  const FieldVector x0 = t.map_point();
  for (Method m : {Method::mh, Method::hmc, Method::mala, Method::sn_map}) {
    auto c = config(m, 2000, 19);
    c.dt = 2.0;
    c.tau = 1.0;
    SamplerInputs in;
    in.h_map = SpdFactor::identity(2);
    const Chain ch = run_sampler(t, x0, c, in);
    EXPECT_TRUE((ch.samples.array() > 0.0).all()) << to_string(m);
    EXPECT_LT(ch.acceptance_rate, 1.0) << to_string(m);
  }
}
