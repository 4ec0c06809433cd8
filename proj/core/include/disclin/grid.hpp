#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>

#include "disclin/errors.hpp"

namespace disclin {

// Annular tensor grid: n_r log-spaced radii r_k = r_min * rho^k covering
// [r_min, 1] (rho = (1/r_min)^{1/(n_r-1)}), n_phi uniform angles
// phi_j = 2*pi*j/n_phi (periodic, no duplicate seam node).
// Node order for serialization is r-major: node(k, j) = k * n_phi + j.
class PolarGrid {
 public:
  PolarGrid(int n_r, int n_phi, double r_min);

  int n_r() const { return n_r_; }
  int n_phi() const { return n_phi_; }
  double r_min() const { return r_min_; }
  double r(int k) const { return r_[k]; }
  double phi(int j) const { return dphi_ * j; }
  double dphi() const { return dphi_; }
  // Uniform spacing of s = log r.
  double ds() const { return ds_; }
  std::int64_t size() const { return std::int64_t(n_r_) * n_phi_; }

  const Eigen::ArrayXd& radii() const { return r_; }
  // Trapezoidal radial quadrature weight w_k (plain r, non-uniform).
  const Eigen::ArrayXd& rweights() const { return w_; }
  const Eigen::ArrayXd& cos_phi() const { return cphi_; }
  const Eigen::ArrayXd& sin_phi() const { return sphi_; }

  Eigen::Vector2d point(int k, int j) const {
    return r_[k] * Eigen::Vector2d(std::cos(phi(j)), std::sin(phi(j)));
  }

  // Index of the grid ring nearest to radius r (in log r distance).
  int nearest_ring(double r) const;

 private:
  int n_r_;
  int n_phi_;
  double r_min_;
  double dphi_;
  double ds_;
  Eigen::ArrayXd r_;
  Eigen::ArrayXd w_;
  Eigen::ArrayXd cphi_;
  Eigen::ArrayXd sphi_;
};

// Nodal fields are (n_r x n_phi) arrays, row k = ring k.
struct ScalarField {
  Eigen::ArrayXXd a;
};

struct VectorField2 {
  Eigen::ArrayXXd x, y;
};

struct Map3 {
  std::array<Eigen::ArrayXXd, 3> c;
};

ScalarField make_scalar(const PolarGrid& g);
VectorField2 make_vector2(const PolarGrid& g);
Map3 make_map3(const PolarGrid& g);

void check_shape(const Eigen::ArrayXXd& a, const PolarGrid& g, const char* what);
void check_shape(const ScalarField& f, const PolarGrid& g, const char* what);
void check_shape(const VectorField2& f, const PolarGrid& g, const char* what);
void check_shape(const Map3& f, const PolarGrid& g, const char* what);

// Cartesian gradient Dv = v_r rhat + (v_phi / r) phihat of a nodal scalar,
// second-order stencils (one-sided at the radial ends, periodic in phi).
VectorField2 gradient(const ScalarField& v, const PolarGrid& g);

// Cartesian Hessian assembled from the polar second derivatives
// v_rr, v_rphi/r - v_phi/r^2, v_phiphi/r^2 + v_r/r. Symmetric by construction.
struct HessianField {
  Eigen::ArrayXXd xx, xy, yy;
};

HessianField hessian(const ScalarField& v, const PolarGrid& g);

// Integral over the annulus: sum density(k,j) * r_k * w_k * dphi.
double integrate(const ScalarField& density, const PolarGrid& g);

// Integral restricted to radii in [a, b] (interval clipped to the grid range;
// partial cells handled by linear interpolation of the ring totals in r).
double integrate_annulus(const ScalarField& density, const PolarGrid& g, double a, double b);

// Line integral over the circle of radius r of a nodal scalar. Off-ring radii
// are linearly interpolated (in log r) between the two bracketing rings and
// flagged.
struct RingIntegral {
  double value = 0.0;
  bool interpolated = false;
};

RingIntegral circle_integral(const ScalarField& f, const PolarGrid& g, double r);

// Separable Catmull-Rom resampling in (log r, phi): clamped at the radial
// ends (constant extension beyond the source range), periodic in phi.
ScalarField resample(const ScalarField& f, const PolarGrid& from, const PolarGrid& to);

}  // namespace disclin
