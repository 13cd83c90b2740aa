#include "hessmc/samplers.hpp"

#include "hessmc/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hessmc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct State {
  FieldVector psi;
  double J = 0.0;
  FieldVector grad;  // empty for value-only kernels
};

struct Proposal {
  State next;
  double log_ratio = -kInf;
  double learning_rate = 1.0;
};

using Kernel = std::function<Proposal(const State&, NoiseStream&)>;

State evaluate_state(const TargetDensity& target, const FieldVector& psi,
                     bool with_gradient) {
  State s;
  s.psi = psi;
  if (with_gradient) {
    auto e = target.evaluate(psi);
    s.J = e.value;
    s.grad = std::move(e.gradient);
  } else {
    s.J = target.in_support(psi) ? target.value(psi) : kInf;
  }
  return s;
}

double draw_learning_rate(const SamplerConfig& cfg, NoiseStream& noise) {
  if (!cfg.random_learning_rate) return 1.0;
  // 1 - U[0,1) lies in (0, 1].
  return cfg.learning_rate_max * (1.0 - noise.uniform());
}

Chain run_chain(const TargetDensity& target, const FieldVector& psi0,
                const SamplerConfig& cfg, bool with_gradient,
                const Kernel& kernel, const RunOptions& run) {
  cfg.validate();
  if (psi0.size() != target.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(target.dim()),
                            static_cast<std::size_t>(psi0.size()));
  }
  if (!target.in_support(psi0)) throw OutOfSupportStart();
  const auto t0 = std::chrono::steady_clock::now();

  NoiseStream owned(cfg.seed);
  NoiseStream& noise = run.noise ? *run.noise : owned;

  State cur = evaluate_state(target, psi0, with_gradient);
  if (!std::isfinite(cur.J)) throw OutOfSupportStart();

  Chain chain;
  chain.method = cfg.method;
  chain.seed = cfg.seed;
  chain.thinning = cfg.thinning;
  chain.initial = psi0;
  const long total = static_cast<long>(cfg.n_samples) * cfg.thinning;
  chain.samples.resize(cfg.n_samples, psi0.size());
  chain.log_j.reserve(cfg.n_samples);
  chain.kept_steps.reserve(cfg.n_samples);
  chain.accepted.reserve(total);

  long n_acc = 0;
  Eigen::Index kept = 0;
  for (long step = 0; step < total; ++step) {
    Proposal prop = kernel(cur, noise);
    const double u = noise.uniform();
    const double a = prop.log_ratio;
    const bool accept = std::isfinite(prop.next.J) && !std::isnan(a) &&
                        std::log(u) < std::min(0.0, a);
    if (run.observer) {
      StepRecord rec;
      rec.step = step;
      rec.current = &cur.psi;
      rec.proposal = &prop.next.psi;
      rec.J_current = cur.J;
      rec.J_proposal = prop.next.J;
      rec.log_ratio = a;
      rec.accepted = accept;
      rec.learning_rate = prop.learning_rate;
      run.observer(rec);
    }
    if (accept) {
      cur = std::move(prop.next);
      ++n_acc;
    }
    chain.accepted.push_back(accept ? 1 : 0);
    if ((step + 1) % cfg.thinning == 0) {
      chain.samples.row(kept++) = cur.psi.transpose();
      chain.log_j.push_back(cur.J);
      chain.kept_steps.push_back(step);
    }
  }
  chain.acceptance_rate = total > 0 ? static_cast<double>(n_acc) / total : 0.0;
  chain.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
  return chain;
}

void check_factor(const SpdFactor& f, const TargetDensity& target) {
  if (f.dim() != target.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(target.dim()),
                            static_cast<std::size_t>(f.dim()));
  }
}

}  // namespace

std::string to_string(Method method) {
  switch (method) {
    case Method::mh: return "mh";
    case Method::hmc: return "hmc";
    case Method::h_hmc: return "h_hmc";
    case Method::mala: return "mala";
    case Method::sn_map: return "sn_map";
    case Method::sn_mcmc: return "sn_mcmc";
    case Method::is_map: return "is_map";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  std::string key = name;
  std::replace(key.begin(), key.end(), '-', '_');
  std::transform(key.begin(), key.end(), key.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  for (Method m : {Method::mh, Method::hmc, Method::h_hmc, Method::mala,
                   Method::sn_map, Method::sn_mcmc, Method::is_map}) {
    if (to_string(m) == key) return m;
  }
  if (key == "mh_mcmc") return Method::mh;
  throw std::invalid_argument("unknown sampler method '" + name + "'");
}

void SamplerConfig::validate() const {
  if (!(dt > 0.0)) throw NonPositiveParameter("dt");
  if (!(tau > 0.0) || tau > 1.0) {
    throw std::invalid_argument("tau must lie in (0, 1]");
  }
  if (leapfrog_steps < 1) throw std::invalid_argument("leapfrog_steps must be >= 1");
  if (!(learning_rate_max > 0.0) || learning_rate_max > 1.0) {
    throw std::invalid_argument("learning_rate_max must lie in (0, 1]");
  }
  if (n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (thinning < 1) throw std::invalid_argument("thinning must be >= 1");
}

// ------------------------------------------------------------ building blocks

double hamiltonian(double J, const FieldVector& momentum, const SpdFactor& mass) {
  return J + 0.5 * mass.inverse_quadratic(momentum);
}

LeapfrogResult leapfrog(const TargetDensity& target, const FieldVector& psi,
                        const FieldVector& momentum, const FieldVector& gradient,
                        double dt, int steps, const SpdFactor& mass) {
  LeapfrogResult r;
  r.psi = psi;
  r.momentum = momentum;
  r.gradient = gradient;
  for (int l = 0; l < steps; ++l) {
    r.momentum -= 0.5 * dt * r.gradient;
    r.psi += dt * mass.solve(r.momentum);
    auto e = target.evaluate(r.psi);
    r.J = e.value;
    if (!std::isfinite(r.J)) {
      r.diverged = true;
      r.J = kInf;
      r.gradient.resize(0);
      return r;
    }
    r.gradient = std::move(e.gradient);
    r.momentum -= 0.5 * dt * r.gradient;
  }
  if (steps == 0) r.J = target.value(psi);
  return r;
}

double mala_log_proposal(const FieldVector& to, const FieldVector& from,
                         const FieldVector& grad_from, double tau,
                         const SpdFactor& metric) {
  const Vector r = to - from + tau * metric.solve(grad_from);
  return -r.dot(metric.apply(r)) / (4.0 * tau);
}

double mala_log_ratio(double J0, double J1, const FieldVector& psi0,
                      const FieldVector& psi1, const FieldVector& g0,
                      const FieldVector& g1, double tau, const SpdFactor& metric) {
  const Vector d = psi1 - psi0;
  return J0 - J1 + 0.5 * d.dot(g0 + g1) +
         0.25 * tau * (metric.inverse_quadratic(g0) - metric.inverse_quadratic(g1));
}

double sn_map_log_ratio(double J0, double J1, const FieldVector& psi0,
                        const FieldVector& psi1, const FieldVector& g0,
                        const FieldVector& g1, double gamma,
                        const SpdFactor& h_map) {
  const Vector d = psi1 - psi0;
  return J0 - J1 + gamma * d.dot(g0 + g1) +
         0.5 * gamma * gamma *
             (h_map.inverse_quadratic(g0) - h_map.inverse_quadratic(g1));
}

SpdFactor local_hessian(const TargetDensity& target, const FieldVector& psi) {
  Matrix h;
  try {
    h = target.hessian(psi, HessianMode::analytic);
  } catch (const ModeUnsupported&) {
    throw HessianUnavailable(target.name() +
                             " target has no analytic Hessian for SN-MCMC");
  }
  return eigen_factor_floored(h, kLocalHessianFloor);
}

// ---------------------------------------------------------------- samplers

Chain mh_mcmc(const TargetDensity& target, const FieldVector& psi0,
              const SamplerConfig& cfg, const RunOptions& run) {
  const double dt = cfg.dt;
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    Proposal p;
    p.next = evaluate_state(target, cur.psi + dt * noise.normal(cur.psi.size()), false);
    // Symmetric proposal: the proposal-density ratio is exactly zero.
    p.log_ratio = cur.J - p.next.J;
    return p;
  };
  return run_chain(target, psi0, cfg, false, k, run);
}

Chain hmc(const TargetDensity& target, const FieldVector& psi0,
          const SamplerConfig& cfg, const SpdFactor& mass, const RunOptions& run) {
  check_factor(mass, target);
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    const Vector p0 = mass.apply_sqrt(noise.normal(cur.psi.size()));
    auto lf = leapfrog(target, cur.psi, p0, cur.grad, cfg.dt, cfg.leapfrog_steps, mass);
    Proposal p;
    p.next.psi = std::move(lf.psi);
    p.next.J = lf.J;
    p.next.grad = std::move(lf.gradient);
    if (!lf.diverged) {
      p.log_ratio = hamiltonian(cur.J, p0, mass) - hamiltonian(lf.J, lf.momentum, mass);
    }
    return p;
  };
  return run_chain(target, psi0, cfg, true, k, run);
}

Chain h_hmc(const TargetDensity& target, const FieldVector& psi0,
            const SamplerConfig& cfg, const SpdFactor& h_map, const RunOptions& run) {
  return hmc(target, psi0, cfg, h_map, run);
}

Chain mala(const TargetDensity& target, const FieldVector& psi0,
           const SamplerConfig& cfg, const SpdFactor& metric, const RunOptions& run) {
  check_factor(metric, target);
  const double tau = cfg.tau;
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    const Vector u = noise.normal(cur.psi.size());
    Proposal p;
    const Vector z = cur.psi - tau * metric.solve(cur.grad) +
                     std::sqrt(2.0 * tau) * metric.solve_sqrt_transpose(u);
    p.next = evaluate_state(target, z, true);
    if (std::isfinite(p.next.J)) {
      p.log_ratio = mala_log_ratio(cur.J, p.next.J, cur.psi, p.next.psi, cur.grad,
                                   p.next.grad, tau, metric);
    }
    return p;
  };
  return run_chain(target, psi0, cfg, true, k, run);
}

Chain sn_map(const TargetDensity& target, const FieldVector& psi0,
             const SamplerConfig& cfg, const SpdFactor& h_map, const RunOptions& run) {
  check_factor(h_map, target);
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    Proposal p;
    p.learning_rate = draw_learning_rate(cfg, noise);
    const double gamma = p.learning_rate;
    const Vector u = noise.normal(cur.psi.size());
    const Vector z = cur.psi - gamma * h_map.solve(cur.grad) +
                     h_map.solve_sqrt_transpose(u);
    p.next = evaluate_state(target, z, true);
    if (std::isfinite(p.next.J)) {
      p.log_ratio = sn_map_log_ratio(cur.J, p.next.J, cur.psi, p.next.psi, cur.grad,
                                     p.next.grad, gamma, h_map);
    }
    return p;
  };
  return run_chain(target, psi0, cfg, true, k, run);
}

Chain sn_mcmc(const TargetDensity& target, const FieldVector& psi0,
              const SamplerConfig& cfg, const RunOptions& run) {
  // Fail before any sampling when the target cannot supply a Hessian.
  local_hessian(target, psi0);
  // log q(to | from) with the Hessian H_from of the origin state, including
  // its 1/2 log|H_from| normalization.
  auto log_q = [](const FieldVector& to, const FieldVector& from,
                  const FieldVector& g_from, const SpdFactor& h, double gamma) {
    const Vector r = to - from + gamma * h.solve(g_from);
    return 0.5 * h.log_det() - 0.5 * r.dot(h.apply(r));
  };
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    Proposal p;
    p.learning_rate = draw_learning_rate(cfg, noise);
    const double gamma = p.learning_rate;
    const Vector u = noise.normal(cur.psi.size());
    const SpdFactor h0 = local_hessian(target, cur.psi);
    const Vector z = cur.psi - gamma * h0.solve(cur.grad) + h0.solve_sqrt_transpose(u);
    p.next = evaluate_state(target, z, true);
    if (std::isfinite(p.next.J)) {
      const SpdFactor h1 = local_hessian(target, p.next.psi);
      p.log_ratio = cur.J - p.next.J +
                    log_q(cur.psi, p.next.psi, p.next.grad, h1, gamma) -
                    log_q(p.next.psi, cur.psi, cur.grad, h0, gamma);
    }
    return p;
  };
  return run_chain(target, psi0, cfg, true, k, run);
}

Chain is_map(const TargetDensity& target, const FieldVector& psi_map,
             const SamplerConfig& cfg, const SpdFactor& h_map, const RunOptions& run) {
  check_factor(h_map, target);
  auto log_q = [&](const FieldVector& x) {
    const Vector d = x - psi_map;
    return -0.5 * d.dot(h_map.apply(d));
  };
  Kernel k = [&](const State& cur, NoiseStream& noise) {
    Proposal p;
    const Vector z = psi_map + h_map.solve_sqrt_transpose(noise.normal(cur.psi.size()));
    p.next = evaluate_state(target, z, false);
    if (std::isfinite(p.next.J)) {
      p.log_ratio = cur.J - p.next.J + log_q(cur.psi) - log_q(p.next.psi);
    }
    return p;
  };
  return run_chain(target, psi_map, cfg, false, k, run);
}

Chain run_sampler(const TargetDensity& target, const FieldVector& psi0,
                  const SamplerConfig& cfg, const SamplerInputs& inputs,
                  const RunOptions& run) {
  auto need_h = [&]() -> const SpdFactor& {
    if (!inputs.h_map) {
      throw std::invalid_argument(to_string(cfg.method) + " needs a MAP Hessian");
    }
    return *inputs.h_map;
  };
  switch (cfg.method) {
    case Method::mh:
      return mh_mcmc(target, psi0, cfg, run);
    case Method::hmc:
      return hmc(target, psi0, cfg,
                 inputs.mass ? *inputs.mass : SpdFactor::identity(target.dim()), run);
    case Method::h_hmc:
      return h_hmc(target, psi0, cfg, need_h(), run);
    case Method::mala:
      return mala(target, psi0, cfg,
                  inputs.h_map ? *inputs.h_map : SpdFactor::identity(target.dim()),
                  run);
    case Method::sn_map:
      return sn_map(target, psi0, cfg, need_h(), run);
    case Method::sn_mcmc:
      return sn_mcmc(target, psi0, cfg, run);
    case Method::is_map:
      if (!inputs.psi_map) throw std::invalid_argument("is_map needs a MAP point");
      return is_map(target, *inputs.psi_map, cfg, need_h(), run);
  }
  throw std::invalid_argument("unknown sampler method");
}

}  // namespace hessmc
