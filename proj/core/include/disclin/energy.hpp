#pragma once

#include <Eigen/Dense>

#include "disclin/grid.hpp"
#include "disclin/params.hpp"

namespace disclin {

struct EnergyBreakdown {
  double membrane = 0.0;
  double bending = 0.0;
  double total = 0.0;
};

// Foppl-von Karman energy on the annulus:
//   int |2 sym Du + Dv (x) Dv + Delta^2 xperp (x) xperp|^2
//   + h^2 int |D^2 v|^2.
EnergyBreakdown fvk_energy(const VectorField2& u, const ScalarField& v, const Params& p,
                           const PolarGrid& g);

// Exact gradient of the discrete fvk_energy with respect to the nodal samples
// (adjoint of the evaluation stencils, not a finite-difference estimate).
// Returns the energy of the evaluated state.
EnergyBreakdown fvk_gradient(const VectorField2& u, const ScalarField& v, const Params& p,
                             const PolarGrid& g, VectorField2& grad_u, ScalarField& grad_v);

// Fully nonlinear plate energy:
//   int |Dy^T Dy - g_Delta|^2 + h^2 int |D^2 y|^2.
EnergyBreakdown plate_energy(const Map3& y, const Params& p, const PolarGrid& g);

EnergyBreakdown plate_gradient(const Map3& y, const Params& p, const PolarGrid& g,
                               Map3& grad_y);

// Pointwise |D^2 v|^2 resp. sum_i |D^2 y_i|^2 (no h^2 factor); the quantity
// the dyadic lower-bound certificate is compared against.
ScalarField bending_density_fvk(const ScalarField& v, const PolarGrid& g);
ScalarField bending_density_plate(const Map3& y, const PolarGrid& g);

// Frobenius distance from a 3x3 matrix to SO(3): sqrt(sum (sigma_i - 1)^2)
// with the smallest singular value sign-flipped when det F < 0.
double dist_SO3(const Eigen::Matrix3d& F);

// 3D elastic energy h^{-1} int_{Omega_h} dist^2(DY, SO(3)) of the
// Kirchhoff-Love extension Y(x', x3) = y(x') + x3 nu(x') of the plate ansatz
// pushed through the sector chart. Evaluated from closed-form jets on the
// given grid (pulled back to the unit disk), Gauss-Legendre in x3.
double kl3d_energy(const Params& p, const PolarGrid& g, int n_gauss);

// Gauss-Legendre nodes/weights on [-1, 1].
struct GaussRule {
  Eigen::ArrayXd nodes;
  Eigen::ArrayXd weights;
};

GaussRule gauss_legendre(int n);

}  // namespace disclin
