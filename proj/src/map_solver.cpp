#include "hessmc/map_solver.hpp"

#include "hessmc/errors.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

namespace hessmc {

namespace {

struct LinePoint {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;
  FieldVector psi;
  FieldVector gradient;
};

class LineSearch {
 public:
  LineSearch(const TargetDensity& target, const FieldVector& x,
             const FieldVector& dir, double f0, double slope0,
             const BfgsOptions& opt)
      : target_(target), x_(x), dir_(dir), f0_(f0), slope0_(slope0), opt_(opt) {}

  // Strong-Wolfe bracketing followed by zoom. Returns nullopt when no
  // acceptable step was found; best_ then holds the lowest point seen.
  std::optional<LinePoint> run() {
    LinePoint prev{0.0, f0_, slope0_, x_, {}};
    double alpha = 1.0;
    for (int i = 0; i < opt_.max_line_search; ++i) {
      LinePoint cur = eval(alpha);
      if (!std::isfinite(cur.value) || armijo_fails(cur) ||
          (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur);
      }
      if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
      if (cur.slope >= 0.0) return zoom(cur, prev);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return std::nullopt;
  }

  const std::optional<LinePoint>& best() const { return best_; }

 private:
  LinePoint eval(double alpha) {
    LinePoint p;
    p.alpha = alpha;
    p.psi = x_ + alpha * dir_;
    auto e = target_.evaluate(p.psi);
    p.value = e.value;
    if (std::isfinite(p.value)) {
      p.gradient = std::move(e.gradient);
      p.slope = p.gradient.dot(dir_);
      if (p.value < f0_ && (!best_ || p.value < best_->value)) best_ = p;
    }
    return p;
  }

  // Near the optimum the predicted decrease drops below the rounding level
  // of f; there a value within that level is accepted instead.
  bool armijo_fails(const LinePoint& p) const {
    const double noise = 1e-14 * std::abs(f0_);
    if (-opt_.c1 * p.alpha * slope0_ < noise) return p.value > f0_ + noise;
    return p.value > f0_ + opt_.c1 * p.alpha * slope0_;
  }

  std::optional<LinePoint> zoom(LinePoint lo, LinePoint hi) {
    for (int i = 0; i < opt_.max_line_search; ++i) {
      const double a = lo.alpha, b = hi.alpha;
      double trial = 0.5 * (a + b);
      if (std::isfinite(hi.value)) {
        // Minimizer of the quadratic through (a, f_lo, slope_lo) and (b, f_hi).
        const double d = b - a;
        const double denom = 2.0 * (hi.value - lo.value - lo.slope * d);
        if (denom > 0.0) trial = a - lo.slope * d * d / denom;
      }
      const double lo_b = std::min(a, b) + 0.1 * std::abs(b - a);
      const double hi_b = std::max(a, b) - 0.1 * std::abs(b - a);
      if (!(trial >= lo_b && trial <= hi_b)) trial = 0.5 * (a + b);

      LinePoint cur = eval(trial);
      if (!std::isfinite(cur.value) || armijo_fails(cur) || cur.value >= lo.value) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -opt_.c2 * slope0_) return cur;
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, lo.alpha)) break;
    }
    return std::nullopt;
  }

  const TargetDensity& target_;
  const FieldVector& x_;
  const FieldVector& dir_;
  double f0_, slope0_;
  const BfgsOptions& opt_;
  std::optional<LinePoint> best_;
};

}  // namespace

OptimizeResult bfgs_minimize(const TargetDensity& target, const FieldVector& psi0,
                             const BfgsOptions& options) {
  if (psi0.size() != target.dim()) {
    throw DimensionMismatch(static_cast<std::size_t>(target.dim()),
                            static_cast<std::size_t>(psi0.size()));
  }
  if (!target.in_support(psi0)) throw OutOfSupportStart();
  auto start = target.evaluate(psi0);
  if (!std::isfinite(start.value)) throw OutOfSupportStart();

  const Eigen::Index n = psi0.size();
  OptimizeResult res;
  res.gtol = options.gtol > 0.0 ? options.gtol
                                : 1e-6 * std::max(1.0, std::abs(start.value));
  FieldVector x = psi0;
  double f = start.value;
  FieldVector g = std::move(start.gradient);
  res.history.push_back(f);

  auto initial_inverse = [&](const FieldVector& grad) -> Matrix {
    const double gn = grad.norm();
    return Matrix::Identity(n, n) / (gn > 0.0 ? gn : 1.0);
  };
  Matrix h_inv = initial_inverse(g);
  bool just_reset = true;

  while (res.iterations < options.max_iter) {
    if (g.lpNorm<Eigen::Infinity>() <= res.gtol) {
      res.converged = true;
      break;
    }
    FieldVector dir = -h_inv * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      h_inv = initial_inverse(g);
      dir = -h_inv * g;
      slope = g.dot(dir);
      just_reset = true;
    }

    LineSearch ls(target, x, dir, f, slope, options);
    auto step = ls.run();
    if (!step) {
      ++res.line_search_failures;
      if (ls.best()) {
        step = ls.best();
      } else if (!just_reset) {
        h_inv = initial_inverse(g);
        just_reset = true;
        continue;
      } else {
        break;
      }
    }

    const FieldVector s = step->psi - x;
    const FieldVector y = step->gradient - g;
    x = std::move(step->psi);
    f = step->value;
    g = std::move(step->gradient);
    ++res.iterations;
    res.history.push_back(f);
    const bool first = just_reset;
    just_reset = false;

    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (first) h_inv = Matrix::Identity(n, n) * (sy / y.squaredNorm());
      const double rho = 1.0 / sy;
      const FieldVector hy = h_inv * y;
      // (I - rho s y^T) H (I - rho y s^T) + rho s s^T, expanded.
      h_inv += (rho * rho * y.dot(hy) + rho) * (s * s.transpose()) -
               rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  if (!res.converged && g.lpNorm<Eigen::Infinity>() <= res.gtol) res.converged = true;

  res.psi_map = std::move(x);
  res.J_final = f;
  res.grad_norm_final = g.lpNorm<Eigen::Infinity>();
  res.inverse_hessian = std::move(h_inv);
  return res;
}

OptimizeResult bfgs_minimize(const TargetDensity& target, const FieldVector& psi0,
                             double gtol, int max_iter) {
  BfgsOptions opt;
  opt.gtol = gtol;
  opt.max_iter = max_iter;
  return bfgs_minimize(target, psi0, opt);
}

}  // namespace hessmc
