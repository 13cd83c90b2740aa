#pragma once

#include "hessmc/targets.hpp"

#include <vector>

namespace hessmc {

struct OptimizeResult {
  FieldVector psi_map;
  double J_final = 0.0;
  double grad_norm_final = 0.0;  // infinity norm
  int iterations = 0;
  bool converged = false;
  int line_search_failures = 0;
  double gtol = 0.0;
  /// Final dense inverse-Hessian estimate.
  Matrix inverse_hessian;
  /// J after every accepted iteration, starting with J(psi0).
  std::vector<double> history;
};

struct BfgsOptions {
  /// <= 0 selects 1e-6 * max(1, |J(psi0)|).
  double gtol = 0.0;
  int max_iter = 500;
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
};

/// Dense BFGS with a strong-Wolfe line search. Trial points outside the
/// support (J = +inf) are backtracked. Terminates when ||grad||_inf <= gtol
/// or after max_iter iterations; a failed line search is reported through
/// the result rather than thrown. Throws OutOfSupportStart when psi0 is not
/// in the support.
OptimizeResult bfgs_minimize(const TargetDensity& target, const FieldVector& psi0,
                             const BfgsOptions& options = {});

OptimizeResult bfgs_minimize(const TargetDensity& target, const FieldVector& psi0,
                             double gtol, int max_iter);

}  // namespace hessmc
