#pragma once

#include "hessmc/forward.hpp"
#include "hessmc/prior.hpp"
#include "hessmc/random.hpp"

#include <memory>

namespace hessmc::testing {

// Small transient Darcy problem on a 6x4 mesh over 6 km x 4 km.
inline DarcyProblem small_problem(int nx = 6, int ny = 4) {
  DarcyProblem p;
  p.mesh = Mesh2D(nx, ny, 6000.0, 4000.0);
  p.gravity = {0.0, 9.81};
  p.top_pressure = 5e8;
  p.wells = {{2000.0, 1000.0, 7e-4}, {4000.0, 2000.0, 5e-4}};
  p.horizon = 3e8;
  p.steps = 10;
  return p;
}

inline ObservationPlan small_plan() {
  ObservationPlan plan;
  for (double x : {700.0, 2300.0, 3100.0, 4900.0, 5600.0}) {
    for (double y : {400.0, 1700.0, 2900.0}) plan.points.emplace_back(x, y);
  }
  return plan;
}

inline std::shared_ptr<const BilaplacianPrior> small_prior(const Mesh2D& mesh) {
  const Mesh2D km = mesh.scaled(1e-3);
  return std::make_shared<const BilaplacianPrior>(build_prior(
      km, 2.0, 1.0, Anisotropy{0.3, 1.0, 3.195}, FieldVector::Constant(km.num_nodes(), 33.0)));
}

inline FieldVector perturbed_theta(const Mesh2D& mesh, std::uint64_t seed,
                                   double scale = 0.3) {
  Rng rng(seed);
  return FieldVector::Constant(mesh.num_nodes(), 33.0) +
         scale * standard_normal(rng, mesh.num_nodes());
}

}  // namespace hessmc::testing
