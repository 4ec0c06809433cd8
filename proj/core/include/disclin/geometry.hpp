#pragma once

#include <Eigen/Dense>
#include <array>

#include "disclin/params.hpp"

namespace disclin {

using Matrix32 = Eigen::Matrix<double, 3, 2>;

// Second derivative of a map into R^3: one 2x2 (symmetric) matrix per
// component, D2y[i](a,b) = d^2 y_i / dx_a dx_b.
using Hessian3 = std::array<Eigen::Matrix2d, 3>;

// C^2 ramp used to truncate constructions near the cone tip: eta(t) = 0 for
// t <= 1/2, eta(t) = 1 for t >= 1, quintic s^3(10 - 15s + 6s^2) with
// s = 2t - 1 in between. sup|eta'| = 3.75, sup|eta''| ~ 23.1.
struct Cutoff {
  double value = 0.0;  // eta
  double d1 = 0.0;     // eta'
  double d2 = 0.0;     // eta''
};

Cutoff cutoff(double t);

// Jet of the reference cone y(x) = sqrt(1-Delta^2) x + Delta |x| e3.
struct ConeJet {
  Eigen::Vector3d y;
  Matrix32 dy;
  Hessian3 d2y;
};

// Requires x != 0 (derivatives are singular at the tip).
ConeJet cone_map(const Eigen::Vector2d& x, double delta);

// g_Delta(x) = Id - Delta^2 xperp/|x| (x) xperp/|x|; eigenvalues {1, 1-Delta^2}.
Eigen::Matrix2d reference_metric(const Eigen::Vector2d& x, double delta);

// Cutoff cone y0 = eta(|x|/h) y^Delta with exact derivative jets.
// y0 and Dy0 vanish identically for |x| <= h/2.
struct PlateAnsatz {
  Eigen::Vector3d y;
  Matrix32 dy;
  Hessian3 d2y;
};

PlateAnsatz ansatz_plate(const Eigen::Vector2d& x, const Params& p);

// Small-slope ansatz u = -(Delta^2/2) eta(|x|/h) x, v = Delta eta(|x|/h) |x|.
// The membrane density |2 sym Du + Dv (x) Dv + Delta^2 xperp (x) xperp|^2
// vanishes identically for |x| >= h.
struct FvkAnsatz {
  Eigen::Vector2d u;
  Eigen::Matrix2d du;
  double v = 0.0;
  Eigen::Vector2d dv;
  Eigen::Matrix2d d2v;
};

FvkAnsatz ansatz_fvk(const Eigen::Vector2d& x, const Params& p);

// Sector chart iota(x) = |x| (cos(phi/gamma), sin(phi/gamma)) opening the
// double sector B_{1,Delta} = { |angle(x)| < gamma*pi, |x| < 1 } onto the unit
// disk, gamma = sqrt(1-Delta^2). D2z[l] is the Hessian of component l.
struct SectorJet {
  Eigen::Vector2d z;
  Eigen::Matrix2d dz;
  std::array<Eigen::Matrix2d, 2> d2z;
};

// Requires x in the closed sector (|angle| <= gamma*pi up to roundoff),
// 0 < |x| <= 1.
SectorJet sector_map(const Eigen::Vector2d& x, double delta);

// Inverse chart j(z) = |z| (cos(gamma*psi), sin(gamma*psi)), psi = angle(z),
// defined on the closed unit disk minus the origin (the cut along the
// negative axis maps to the sector edge). j(iota(x)) = x.
Eigen::Vector2d sector_inverse(const Eigen::Vector2d& z, double delta);

}  // namespace disclin
