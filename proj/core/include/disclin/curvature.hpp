#pragma once

#include <Eigen/Dense>
#include <vector>

#include "disclin/grid.hpp"
#include "disclin/params.hpp"

namespace disclin {

// Distributional Gauss curvature mass kappa(r) of B_r, measured from boundary
// data on the circle of radius r via the reduced polar form
//   kappa(r) = 1/2 int_0^{2pi} [ (v,_r)^2 - d/dr( (v,_phi)^2 / r ) ] dphi.
// For smooth fields this equals int_{B_r} det D^2 v; for a cone it sees the
// curvature concentrated at the tip (pi Delta^2) that any interior area
// quadrature on the annulus misses.
struct CurvatureProfile {
  std::vector<double> radii;
  std::vector<double> kappa;
  double target = 0.0;              // pi Delta^2
  std::vector<char> interpolated;   // 1 where the radius was off-grid
};

// kappa at every grid ring (index-aligned with grid radii).
Eigen::ArrayXd kappa_rings_fvk(const ScalarField& v, const PolarGrid& g);
// Same boundary form summed over the three components of a map into R^3.
Eigen::ArrayXd kappa_rings_plate(const Map3& y, const PolarGrid& g);

CurvatureProfile kappa_fvk(const ScalarField& v, const PolarGrid& g, double delta,
                           const std::vector<double>& radii);
CurvatureProfile kappa_plate(const Map3& y, const PolarGrid& g, double delta,
                             const std::vector<double>& radii);

// Area quadrature of det D^2 v over the part of B_r covered by the grid.
double kappa_interior(const ScalarField& v, const PolarGrid& g, double r);

// r0 * 2^j for j = 0, 1, ... while <= r_max.
std::vector<double> dyadic_radii(double r0, double r_max);

// Winding number of a closed sampled curve around a target point, by summed
// signed angle increments rounded to the nearest integer.
// Throws NumericalError when the target is within 10x the largest
// adjacent-sample gap of the curve (on-boundary) or when the angle sum is
// further than 0.1 from an integer multiple of 2 pi (under-resolved).
int brouwer_degree(const std::vector<Eigen::Vector2d>& loop, const Eigen::Vector2d& target);

// The closed polyline of a vector field along grid ring k.
std::vector<Eigen::Vector2d> ring_loop(const VectorField2& f, const PolarGrid& g, int ring);

// Isoperimetric check on the circle of radius r:
//   lhs = int_{dB_r} |d_t(Dv)| dH^1   (tangential derivative of the gradient
//         map, which is <= int |D^2 v|, so this is the stronger form)
//   rhs = sqrt(4 pi |kappa(r)|).
// satisfied <=> lhs >= rhs * (1 - slack). Equality for paraboloids and cones.
struct IsoperRecord {
  double radius = 0.0;  // ring radius actually used
  double lhs = 0.0;
  double rhs = 0.0;
  bool satisfied = false;
};

IsoperRecord isoper_check(const ScalarField& v, const PolarGrid& g, double r,
                          double slack = 0.05);
// Component-wise sum for maps into R^3 (valid by concavity of sqrt).
IsoperRecord isoper_check(const Map3& y, const PolarGrid& g, double r, double slack = 0.05);

// Trapezoid of |kappa(r) - target| dr over the profile radii clipped to [a,b].
double l1_deviation(const CurvatureProfile& prof, double a, double b);

// Distributional identity diagnostic (FvK): with
//   a(s) = int_{r_lo}^{s} dr int dphi ( 2 u_r,_r + (v,_r)^2 ),
//   b(r) = int dphi ( 2 u_r + (v,_phi)^2 / r + Delta^2 r ),
//   F = (a - b)/2,
// the identity F'(r) = -pi Delta^2 + kappa(r) holds. identity_residual is the
// L^1 gap on [r_lo, R] between the finite-difference F' and the right side.
// realized_c = |F'| / sqrt(|F| |F''|) in L^1 norms is recorded, not asserted.
struct InterpolationRecord {
  double r_lo = 0.0;
  double r_hi = 0.0;
  double identity_residual = 0.0;
  double l1_F = 0.0;
  double l1_Fp = 0.0;
  double l1_Fpp = 0.0;
  double realized_c = 0.0;
};

InterpolationRecord interpolation_diagnostic(const VectorField2& u, const ScalarField& v,
                                             const Params& p, const PolarGrid& g, double R);

// Dyadic-annuli lower bound 2 int_a^b |kappa(r)| dr/r, evaluated as a
// trapezoid in log r over the profile radii (exact for constant kappa).
// A cone saturates it: certificate = annulus Hessian content
// int |D^2 v|^2 = 2 pi Delta^2 log(b/a).
double lower_bound_certificate(const CurvatureProfile& prof, double a, double b);

}  // namespace disclin
