#pragma once

#include <Eigen/Dense>

#include "disclin/energy.hpp"
#include "disclin/grid.hpp"
#include "disclin/optimize.hpp"
#include "disclin/params.hpp"
#include "disclin/solver.hpp"

namespace disclin {

// Rotationally symmetric FvK fields u(x) = u(r) rhat, v(x) = v(r), sampled on
// the radial skeleton of a polar grid. Restricting the 2D functional gives
//   E = 2 pi int r [ (2u' + v'^2)^2 + (2u/r + Delta^2)^2 ] dr
//     + 2 pi h^2 int r [ v''^2 + (v'/r)^2 ] dr,
// discretized with the same log-r stencils and radial weights as 2D, so the
// 1D energy of a lifted state matches the 2D energy to quadrature error.
struct RadialFields {
  Eigen::ArrayXd u;  // radial displacement
  Eigen::ArrayXd v;  // out-of-plane displacement
};

RadialFields radial_ansatz(const Params& p, const PolarGrid& g);

EnergyBreakdown radial_fvk_energy(const RadialFields& f, const Params& p, const PolarGrid& g);
EnergyBreakdown radial_fvk_gradient(const RadialFields& f, const Params& p,
                                    const PolarGrid& g, RadialFields& grad);

struct RadialResult {
  RadialFields fields;
  EnergyBreakdown energy;
  OptimizeReport report;
};

// Restarted L-BFGS over (u, v) from the radial ansatz. Only v carries a shift
// gauge (u enters through its value in 2u/r), so only v is mean-centered.
RadialResult radial_minimize(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg);

// Rotation-invariant 2D state from a radial profile; radial interpolation when
// the grids differ. Throws UsageError when the target radii leave the source
// range.
FvkState lift_to_2d(const RadialFields& f, const PolarGrid& from, const PolarGrid& to);

}  // namespace disclin
