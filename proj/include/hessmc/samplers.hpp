#pragma once

#include "hessmc/random.hpp"
#include "hessmc/spd.hpp"
#include "hessmc/targets.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hessmc {

enum class Method { mh, hmc, h_hmc, mala, sn_map, sn_mcmc, is_map };

std::string to_string(Method method);
/// Accepts the names printed by to_string ("mh", "h_hmc", ...) and the
/// dashed spellings ("h-hmc", "sn-map", ...). Throws std::invalid_argument.
Method parse_method(const std::string& name);

struct SamplerConfig {
  Method method = Method::mh;
  double dt = 0.1;         // MH step, leapfrog step
  double tau = 0.5;        // MALA
  int leapfrog_steps = 1;  // HMC family
  /// SN family: when random_learning_rate is set, every step draws
  /// gamma ~ U(0, learning_rate_max]; otherwise gamma = 1.
  double learning_rate_max = 1.0;
  bool random_learning_rate = false;
  int n_samples = 1000;  // kept samples; raw steps = n_samples * thinning
  std::uint64_t seed = 0;
  int thinning = 1;

  /// Throws NonPositiveParameter / std::invalid_argument.
  void validate() const;
};

/// Source of the standard normal and uniform draws consumed by a chain.
/// Every kernel draws, in order: [gamma uniform if enabled], one normal
/// vector, one acceptance uniform. Two chains fed identical streams
/// therefore see matched whitened noise.
class NoiseStream {
 public:
  explicit NoiseStream(std::uint64_t seed) : rng_(seed) {}
  virtual ~NoiseStream() = default;

  virtual Vector normal(Eigen::Index n) { return standard_normal(rng_, n); }
  virtual double uniform() { return uniform01(rng_); }

 private:
  Rng rng_;
};

struct StepRecord {
  long step = 0;
  const FieldVector* current = nullptr;
  const FieldVector* proposal = nullptr;
  double J_current = 0.0;
  double J_proposal = 0.0;
  double log_ratio = 0.0;  // alpha
  bool accepted = false;
  double learning_rate = 1.0;
};

using StepObserver = std::function<void(const StepRecord&)>;

struct RunOptions {
  /// Overrides the stream seeded from cfg.seed when set.
  NoiseStream* noise = nullptr;
  StepObserver observer;
};

struct Chain {
  Method method = Method::mh;
  std::uint64_t seed = 0;
  int thinning = 1;
  FieldVector initial;
  /// Kept states, one row per kept step (state after that step).
  Matrix samples;
  std::vector<double> log_j;      // J of each kept state
  std::vector<char> accepted;     // one flag per raw step
  std::vector<long> kept_steps;   // raw step index of each kept row
  double acceptance_rate = 0.0;   // over raw steps
  double wall_time = 0.0;         // seconds

  Eigen::Index size() const noexcept { return samples.rows(); }
  Eigen::Index dim() const noexcept { return samples.cols(); }
};

Chain mh_mcmc(const TargetDensity& target, const FieldVector& psi0,
              const SamplerConfig& cfg, const RunOptions& run = {});

/// Plain HMC with a constant mass matrix (identity for the textbook method).
Chain hmc(const TargetDensity& target, const FieldVector& psi0,
          const SamplerConfig& cfg, const SpdFactor& mass,
          const RunOptions& run = {});

/// HMC with mass = H_MAP.
Chain h_hmc(const TargetDensity& target, const FieldVector& psi0,
            const SamplerConfig& cfg, const SpdFactor& h_map,
            const RunOptions& run = {});

/// Preconditioned MALA with B = metric^{-1}:
///   z = psi - tau B g + sqrt(2 tau) B^{1/2} u.
Chain mala(const TargetDensity& target, const FieldVector& psi0,
           const SamplerConfig& cfg, const SpdFactor& metric,
           const RunOptions& run = {});

/// z = psi - gamma H^{-1} g + H^{-1/2} u with the fixed MAP Hessian.
Chain sn_map(const TargetDensity& target, const FieldVector& psi0,
             const SamplerConfig& cfg, const SpdFactor& h_map,
             const RunOptions& run = {});

/// Stochastic Newton with the local Hessian at every state. Needs an
/// analytic Hessian; throws HessianUnavailable otherwise.
Chain sn_mcmc(const TargetDensity& target, const FieldVector& psi0,
              const SamplerConfig& cfg, const RunOptions& run = {});

/// Independence sampler with proposals N(psi_map, H_MAP^{-1}); the chain
/// starts at psi_map.
Chain is_map(const TargetDensity& target, const FieldVector& psi_map,
             const SamplerConfig& cfg, const SpdFactor& h_map,
             const RunOptions& run = {});

/// Inputs the dispatcher may need depending on the method.
struct SamplerInputs {
  std::optional<SpdFactor> h_map;  // h_hmc, sn_map, is_map; mala metric
  std::optional<SpdFactor> mass;   // hmc (identity when empty)
  std::optional<FieldVector> psi_map;
};

/// Runs cfg.method. Throws std::invalid_argument when a required input is
/// missing.
Chain run_sampler(const TargetDensity& target, const FieldVector& psi0,
                  const SamplerConfig& cfg, const SamplerInputs& inputs,
                  const RunOptions& run = {});

// ------------------------------------------------------------ building blocks

struct LeapfrogResult {
  FieldVector psi;
  FieldVector momentum;
  double J = 0.0;
  FieldVector gradient;
  bool diverged = false;  // left the support mid-trajectory
};

/// `steps` leapfrog steps: half kick, drift with M^{-1}, half kick.
LeapfrogResult leapfrog(const TargetDensity& target, const FieldVector& psi,
                        const FieldVector& momentum, const FieldVector& gradient,
                        double dt, int steps, const SpdFactor& mass);

/// H = J + 1/2 p^T M^{-1} p.
double hamiltonian(double J, const FieldVector& momentum, const SpdFactor& mass);

/// log q(to | from) + const for the MALA proposal.
double mala_log_proposal(const FieldVector& to, const FieldVector& from,
                         const FieldVector& grad_from, double tau,
                         const SpdFactor& metric);

/// Expanded log acceptance ratio of MALA:
///   J0 - J1 + 1/2 d^T (g0 + g1) + tau/4 (g0^T B g0 - g1^T B g1),  d = psi1 - psi0.
double mala_log_ratio(double J0, double J1, const FieldVector& psi0,
                      const FieldVector& psi1, const FieldVector& g0,
                      const FieldVector& g1, double tau, const SpdFactor& metric);

/// Expanded log acceptance ratio of SN-MAP with learning rate gamma:
///   J0 - J1 + gamma d^T (g0 + g1) + gamma^2/2 (g0^T H^{-1} g0 - g1^T H^{-1} g1).
double sn_map_log_ratio(double J0, double J1, const FieldVector& psi0,
                        const FieldVector& psi1, const FieldVector& g0,
                        const FieldVector& g1, double gamma,
                        const SpdFactor& h_map);

/// Local SPD Hessian used by SN-MCMC: the analytic Hessian with
/// eigenvalues floored at kLocalHessianFloor * max|lambda|.
inline constexpr double kLocalHessianFloor = 1e-6;
SpdFactor local_hessian(const TargetDensity& target, const FieldVector& psi);

}  // namespace hessmc
