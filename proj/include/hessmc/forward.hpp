#pragma once

#include "hessmc/mesh.hpp"
#include "hessmc/spd.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace hessmc {

/// Fluid constants (SI units).
struct FluidProperties {
  double bulk_modulus = 2270e6;  // Pa
  double density = 1000.0;       // kg/m^3
  double viscosity = 1e-3;       // Pa s
};

/// Injection well; the rate (m^2/s per unit thickness) is applied at the
/// mesh node nearest to (x, y).
struct Well {
  double x = 0.0;
  double y = 0.0;
  double rate = 0.0;
};

/// Transient single-phase Darcy flow
///
///   c dp/dt - div( (e^{-theta} / mu) (grad p + rho g) ) = q_wells
///
/// with c = porosity / K_f, Dirichlet pressure on the top edge (y = ly),
/// zero flux on the other edges, and implicit Euler in time. The unknown
/// field theta = -log(permeability) enters only through the mobility.
struct DarcyProblem {
  Mesh2D mesh{1, 1, 1.0, 1.0};
  FluidProperties fluid;
  double porosity = 0.2;
  /// Body-force vector in the flux law (grad p + rho g). With g = (0, +g0)
  /// the hydrostatic pressure increases downward.
  Eigen::Vector2d gravity{0.0, 0.0};
  double top_pressure = 0.0;  // Pa
  std::vector<Well> wells;
  double horizon = 1.0;  // s
  int steps = 20;
  /// Initial pressure at every node; empty means hydrostatic equilibrium
  /// consistent with top_pressure and gravity.
  Vector initial_pressure;

  double storage() const noexcept { return porosity / fluid.bulk_modulus; }
  double dt() const noexcept { return horizon / steps; }

  /// Throws std::invalid_argument when an invariant is violated.
  void validate() const;

  /// Initial field actually used (hydrostatic when initial_pressure empty).
  Vector initial_field() const;
};

/// Pointwise pressure observations at the final time, bilinearly
/// interpolated inside the containing cell.
struct ObservationPlan {
  std::vector<Eigen::Vector2d> points;

  Eigen::Index size() const noexcept {
    return static_cast<Eigen::Index>(points.size());
  }
};

/// Pressure fields at t_0 = 0, ..., t_{n_t} = horizon.
struct Trajectory {
  Mesh2D mesh;
  double dt = 0.0;
  std::vector<Vector> pressure;

  const Vector& final() const { return pressure.back(); }
};

Trajectory solve_forward(const DarcyProblem& problem, const FieldVector& theta);

/// Dense (n_obs x n_nodes) interpolation matrix; throws PointOutsideDomain.
Matrix observation_matrix(const Mesh2D& mesh, const ObservationPlan& plan);

/// Final-time pressures at the plan points, in plan order.
Vector observe(const Trajectory& trajectory, const ObservationPlan& plan);

/// observe(solve_forward(theta)) plus sigma * N(0, I) noise drawn from seed.
Vector synth_data(const DarcyProblem& problem, const FieldVector& theta_true,
                  const ObservationPlan& plan, double sigma, std::uint64_t seed);

/// 1/(2 sigma^2) ||observe(theta) - y||^2.
double misfit(const DarcyProblem& problem, const FieldVector& theta,
              const ObservationPlan& plan, const Vector& y, double sigma);

struct MisfitEvaluation {
  double value = 0.0;
  FieldVector gradient;
};

/// Misfit and its gradient from one forward and one adjoint sweep of the
/// assembled discrete system.
MisfitEvaluation misfit_and_gradient(const DarcyProblem& problem,
                                     const FieldVector& theta,
                                     const ObservationPlan& plan,
                                     const Vector& y, double sigma);

/// Gradient of the misfit term only.
FieldVector gradient_adjoint(const DarcyProblem& problem, const FieldVector& theta,
                             const ObservationPlan& plan, const Vector& y,
                             double sigma);

/// d(observations)/d(theta), one adjoint sweep per observation.
Matrix observation_jacobian(const DarcyProblem& problem, const FieldVector& theta,
                            const ObservationPlan& plan);

/// Gauss-Newton misfit Hessian J^T J / sigma^2 (symmetric PSD).
Matrix misfit_hessian_gn(const DarcyProblem& problem, const FieldVector& theta,
                         const ObservationPlan& plan, double sigma);

/// Net volume leaving through the Dirichlet edge over the whole horizon,
/// from the reaction forces of the discrete system.
double boundary_outflow(const DarcyProblem& problem, const FieldVector& theta,
                        const Trajectory& trajectory);

}  // namespace hessmc
