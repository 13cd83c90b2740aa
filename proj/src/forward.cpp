#include "hessmc/forward.hpp"

#include "hessmc/errors.hpp"
#include "hessmc/prior.hpp"
#include "hessmc/random.hpp"

#include <cmath>
#include <stdexcept>

namespace hessmc {

void DarcyProblem::validate() const {
  if (!(porosity > 0.0)) throw std::invalid_argument("porosity must be positive");
  if (!(fluid.bulk_modulus > 0.0)) {
    throw std::invalid_argument("fluid bulk modulus must be positive");
  }
  if (!(fluid.viscosity > 0.0)) {
    throw std::invalid_argument("fluid viscosity must be positive");
  }
  if (steps < 1) throw std::invalid_argument("time steps must be >= 1");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (initial_pressure.size() != 0 &&
      initial_pressure.size() != mesh.num_nodes()) {
    throw std::invalid_argument("initial pressure has the wrong length");
  }
  for (const auto& w : wells) {
    if (!mesh.contains(w.x, w.y)) {
      throw std::invalid_argument("well lies outside the domain");
    }
    const auto node = mesh.nearest_node(w.x, w.y);
    if (node >= static_cast<Eigen::Index>(mesh.nx() + 1) * mesh.ny()) {
      throw std::invalid_argument("well lies on the Dirichlet edge");
    }
  }
}

Vector DarcyProblem::initial_field() const {
  Vector p;
  if (initial_pressure.size() != 0) {
    p = initial_pressure;
  } else {
    p.resize(mesh.num_nodes());
    const double head = fluid.density * gravity.y();
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const auto x = mesh.coord(i);
      p[i] = top_pressure + head * (mesh.ly() - x.y()) -
             fluid.density * gravity.x() * x.x();
    }
  }
  const Eigen::Index nd = mesh.nx() + 1;
  p.tail(nd).setConstant(top_pressure);
  return p;
}

namespace {

// Assembled implicit-Euler system for one theta. Free nodes are the first
// (nx+1)*ny indices; the top row (Dirichlet) is last.
struct FlowSystem {
  const DarcyProblem& problem;
  Eigen::Index n, nf, nd;
  std::array<QuadPoint, 4> quad;
  Vector mobility_q;  // (cell, quad point) -> e^{-theta}/mu
  Matrix stiffness;   // flux part
  Vector gravity_load;
  Vector source_load;
  Matrix storage;     // c N / dt
  Eigen::LLT<Matrix> llt;
  Vector boundary_values;
  Vector constant_rhs;  // free part

  FlowSystem(const DarcyProblem& p, const FieldVector& theta)
      : problem(p),
        n(p.mesh.num_nodes()),
        nf(static_cast<Eigen::Index>(p.mesh.nx() + 1) * p.mesh.ny()),
        nd(p.mesh.nx() + 1),
        quad(cell_quadrature(p.mesh)) {
    if (theta.size() != n) {
      throw DimensionMismatch(static_cast<std::size_t>(n),
                              static_cast<std::size_t>(theta.size()));
    }
    const auto& mesh = p.mesh;
    const double mu = p.fluid.viscosity;
    const Eigen::Vector2d body = p.fluid.density * p.gravity;

    mobility_q.resize(4 * mesh.num_cells());
    stiffness = Matrix::Zero(n, n);
    gravity_load = Vector::Zero(n);
    for (int cy = 0; cy < mesh.ny(); ++cy) {
      for (int cx = 0; cx < mesh.nx(); ++cx) {
        const int cell = cy * mesh.nx() + cx;
        const auto nodes = mesh.cell_nodes(cx, cy);
        for (int q = 0; q < 4; ++q) {
          const auto& qp = quad[q];
          double th = 0.0;
          for (int a = 0; a < 4; ++a) th += qp.phi[a] * theta[nodes[a]];
          const double mob = std::exp(-th) / mu;
          mobility_q[4 * cell + q] = mob;
          const double wm = qp.weight * mob;
          for (int a = 0; a < 4; ++a) {
            gravity_load[nodes[a]] += wm * body.dot(qp.grad[a]);
            for (int b = 0; b < 4; ++b) {
              stiffness(nodes[a], nodes[b]) += wm * qp.grad[a].dot(qp.grad[b]);
            }
          }
        }
      }
    }

    storage = (p.storage() / p.dt()) * assemble_mass(mesh);

    source_load = Vector::Zero(n);
    for (const auto& w : p.wells) source_load[mesh.nearest_node(w.x, w.y)] += w.rate;

    boundary_values = Vector::Constant(nd, p.top_pressure);

    Matrix a_ff = storage.topLeftCorner(nf, nf) + stiffness.topLeftCorner(nf, nf);
    llt.compute(a_ff);
    if (llt.info() != Eigen::Success) throw ForwardSolveFailure(1);

    constant_rhs = -stiffness.topRightCorner(nf, nd) * boundary_values -
                   gravity_load.head(nf) + source_load.head(nf);
  }

  Trajectory run() const {
    Trajectory traj{problem.mesh, problem.dt(), {}};
    traj.pressure.reserve(problem.steps + 1);
    Vector p = problem.initial_field();
    traj.pressure.push_back(p);
    for (int step = 1; step <= problem.steps; ++step) {
      Vector rhs = storage.topLeftCorner(nf, nf) * p.head(nf) + constant_rhs;
      Vector next = llt.solve(rhs);
      if (!next.allFinite()) throw ForwardSolveFailure(static_cast<std::size_t>(step));
      p.head(nf) = next;
      traj.pressure.push_back(p);
    }
    return traj;
  }

  // Adjoint sweep for k terminal loads at once. `terminal` holds
  // d(functional)/d(p_final) restricted to free nodes (nf x k). Returns the
  // gradient of each functional with respect to theta (n x k).
  Matrix adjoint(const Trajectory& traj, const Matrix& terminal) const {
    const auto& mesh = problem.mesh;
    const Eigen::Index k = terminal.cols();
    const Eigen::Vector2d body = problem.fluid.density * problem.gravity;
    Matrix grad = Matrix::Zero(n, k);
    Matrix lambda = llt.solve(-terminal);
    Matrix lambda_full = Matrix::Zero(n, k);

    for (int step = problem.steps; step >= 1; --step) {
      lambda_full.topRows(nf) = lambda;
      const Vector& p = traj.pressure[step];
      for (int cy = 0; cy < mesh.ny(); ++cy) {
        for (int cx = 0; cx < mesh.nx(); ++cx) {
          const int cell = cy * mesh.nx() + cx;
          const auto nodes = mesh.cell_nodes(cx, cy);
          for (int q = 0; q < 4; ++q) {
            const auto& qp = quad[q];
            Eigen::Vector2d drive = body;
            for (int a = 0; a < 4; ++a) drive += p[nodes[a]] * qp.grad[a];
            // grad(lambda) . drive for every column
            Eigen::RowVectorXd flux = Eigen::RowVectorXd::Zero(k);
            for (int a = 0; a < 4; ++a) {
              flux += qp.grad[a].dot(drive) * lambda_full.row(nodes[a]);
            }
            flux *= qp.weight * mobility_q[4 * cell + q];
            for (int b = 0; b < 4; ++b) grad.row(nodes[b]) -= qp.phi[b] * flux;
          }
        }
      }
      if (step > 1) lambda = llt.solve(storage.topLeftCorner(nf, nf) * lambda);
    }
    return grad;
  }
};

}  // namespace

Trajectory solve_forward(const DarcyProblem& problem, const FieldVector& theta) {
  problem.validate();
  if (!theta.allFinite()) throw std::invalid_argument("theta must be finite");
  return FlowSystem(problem, theta).run();
}

Matrix observation_matrix(const Mesh2D& mesh, const ObservationPlan& plan) {
  Matrix out = Matrix::Zero(plan.size(), mesh.num_nodes());
  for (Eigen::Index i = 0; i < plan.size(); ++i) {
    const auto& pt = plan.points[i];
    const auto loc = mesh.locate(pt.x(), pt.y());
    if (!loc) throw PointOutsideDomain(static_cast<std::size_t>(i));
    const auto nodes = mesh.cell_nodes(loc->cx, loc->cy);
    const auto w = Mesh2D::shape(loc->xi, loc->eta);
    for (int a = 0; a < 4; ++a) out(i, nodes[a]) += w[a];
  }
  return out;
}

Vector observe(const Trajectory& trajectory, const ObservationPlan& plan) {
  return observation_matrix(trajectory.mesh, plan) * trajectory.final();
}

Vector synth_data(const DarcyProblem& problem, const FieldVector& theta_true,
                  const ObservationPlan& plan, double sigma,
                  std::uint64_t seed) {
  Vector y = observe(solve_forward(problem, theta_true), plan);
  Rng rng(seed);
  const Vector eta = standard_normal(rng, y.size());
  return y + sigma * eta;
}

double misfit(const DarcyProblem& problem, const FieldVector& theta,
              const ObservationPlan& plan, const Vector& y, double sigma) {
  const Vector r = observe(solve_forward(problem, theta), plan) - y;
  return 0.5 * r.squaredNorm() / (sigma * sigma);
}

MisfitEvaluation misfit_and_gradient(const DarcyProblem& problem,
                                     const FieldVector& theta,
                                     const ObservationPlan& plan,
                                     const Vector& y, double sigma) {
  problem.validate();
  if (y.size() != plan.size()) {
    throw DimensionMismatch(static_cast<std::size_t>(plan.size()),
                            static_cast<std::size_t>(y.size()));
  }
  FlowSystem system(problem, theta);
  const Trajectory traj = system.run();
  const Matrix obs = observation_matrix(problem.mesh, plan);
  const Vector r = obs * traj.final() - y;
  const double s2 = sigma * sigma;

  MisfitEvaluation out;
  out.value = 0.5 * r.squaredNorm() / s2;
  const Matrix terminal = obs.leftCols(system.nf).transpose() * (r / s2);
  out.gradient = system.adjoint(traj, terminal).col(0);
  return out;
}

FieldVector gradient_adjoint(const DarcyProblem& problem, const FieldVector& theta,
                             const ObservationPlan& plan, const Vector& y,
                             double sigma) {
  return misfit_and_gradient(problem, theta, plan, y, sigma).gradient;
}

Matrix observation_jacobian(const DarcyProblem& problem, const FieldVector& theta,
                            const ObservationPlan& plan) {
  problem.validate();
  FlowSystem system(problem, theta);
  const Trajectory traj = system.run();
  const Matrix obs = observation_matrix(problem.mesh, plan);
  const Matrix terminal = obs.leftCols(system.nf).transpose();
  return system.adjoint(traj, terminal).transpose();
}

Matrix misfit_hessian_gn(const DarcyProblem& problem, const FieldVector& theta,
                         const ObservationPlan& plan, double sigma) {
  const Matrix jac = observation_jacobian(problem, theta, plan);
  Matrix h = jac.transpose() * jac / (sigma * sigma);
  return 0.5 * (h + h.transpose());
}

double boundary_outflow(const DarcyProblem& problem, const FieldVector& theta,
                        const Trajectory& trajectory) {
  FlowSystem system(problem, theta);
  double total = 0.0;
  for (int step = 1; step <= problem.steps; ++step) {
    const Vector& p = trajectory.pressure[step];
    const Vector& prev = trajectory.pressure[step - 1];
    const Vector reaction = system.storage * (p - prev) + system.stiffness * p +
                            system.gravity_load - system.source_load;
    total -= problem.dt() * reaction.tail(system.nd).sum();
  }
  return total;
}

}  // namespace hessmc
