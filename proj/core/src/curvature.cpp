#include "disclin/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disclin/errors.hpp"
#include "disclin/stencil.hpp"

namespace disclin {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::ArrayXXd scale_rows(const Eigen::ArrayXXd& a, const Eigen::ArrayXd& f) {
  return a.colwise() * f;
}

Eigen::ArrayXXd scale_cols(const Eigen::ArrayXXd& a, const Eigen::ArrayXd& f) {
  Eigen::ArrayXXd out(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j) out.col(j) = a.col(j) * f(j);
  return out;
}

// Reduced boundary form for one scalar component.
Eigen::ArrayXd kappa_rings_scalar(const Eigen::ArrayXXd& v, const PolarGrid& g) {
  const Eigen::ArrayXd inv_r = g.radii().inverse();
  const Eigen::ArrayXXd vr = scale_rows(stencil::d_s(g, v), inv_r);
  const Eigen::ArrayXXd vphi = stencil::d_phi(g, v);
  const Eigen::ArrayXXd q = scale_rows(vphi.square(), inv_r);
  const Eigen::ArrayXXd dq = scale_rows(stencil::d_s(g, q), inv_r);
  return 0.5 * g.dphi() * (vr.square() - dq).rowwise().sum();
}

// Linear interpolation of ring values in s = log r; flags off-ring radii.
CurvatureProfile profile_from_rings(const Eigen::ArrayXd& rings, const PolarGrid& g,
                                    double delta, const std::vector<double>& radii) {
  CurvatureProfile prof;
  prof.target = kPi * delta * delta;
  prof.radii = radii;
  prof.kappa.reserve(radii.size());
  prof.interpolated.reserve(radii.size());
  const double s0 = std::log(g.r(0));
  for (double r : radii) {
    if (r < g.r(0) * (1.0 - 1e-9) || r > g.r(g.n_r() - 1) * (1.0 + 1e-9))
      throw UsageError("curvature radius outside grid range");
    const double pos = (std::log(r) - s0) / g.ds();
    const int k = static_cast<int>(std::lround(pos));
    if (k >= 0 && k < g.n_r() && std::abs(pos - k) < 1e-9) {
      prof.kappa.push_back(rings(k));
      prof.interpolated.push_back(0);
    } else {
      const int lo = std::clamp(static_cast<int>(std::floor(pos)), 0, g.n_r() - 2);
      const double t = pos - lo;
      prof.kappa.push_back((1.0 - t) * rings(lo) + t * rings(lo + 1));
      prof.interpolated.push_back(1);
    }
  }
  return prof;
}

// Knots of a piecewise linear profile restricted to [a, b], in abscissa x(r).
struct Knots {
  std::vector<double> x;
  std::vector<double> k;
};

Knots clip_profile(const CurvatureProfile& prof, double a, double b,
                   double (*abscissa)(double)) {
  if (prof.radii.size() < 2) throw UsageError("profile needs at least two radii");
  for (std::size_t i = 1; i < prof.radii.size(); ++i)
    if (prof.radii[i] <= prof.radii[i - 1])
      throw UsageError("profile radii must be increasing");
  const double lo = std::max(a, prof.radii.front());
  const double hi = std::min(b, prof.radii.back());
  Knots kn;
  if (lo >= hi) return kn;
  auto value_at = [&](double r) {
    const auto it = std::upper_bound(prof.radii.begin(), prof.radii.end(), r);
    const std::size_t j =
        std::clamp<std::size_t>(static_cast<std::size_t>(it - prof.radii.begin()), 1,
                                prof.radii.size() - 1);
    const double t = (r - prof.radii[j - 1]) / (prof.radii[j] - prof.radii[j - 1]);
    return (1.0 - t) * prof.kappa[j - 1] + t * prof.kappa[j];
  };
  kn.x.push_back(abscissa(lo));
  kn.k.push_back(value_at(lo));
  for (std::size_t i = 0; i < prof.radii.size(); ++i) {
    if (prof.radii[i] > lo && prof.radii[i] < hi) {
      kn.x.push_back(abscissa(prof.radii[i]));
      kn.k.push_back(prof.kappa[i]);
    }
  }
  kn.x.push_back(abscissa(hi));
  kn.k.push_back(value_at(hi));
  return kn;
}

double identity(double r) { return r; }
double log_abscissa(double r) { return std::log(r); }

// Second-order first derivative of a uniformly sampled sequence.
Eigen::ArrayXd d1_uniform(const Eigen::ArrayXd& f, double dx) {
  const Eigen::Index n = f.size();
  Eigen::ArrayXd out(n);
  out(0) = (-1.5 * f(0) + 2.0 * f(1) - 0.5 * f(2)) / dx;
  for (Eigen::Index i = 1; i + 1 < n; ++i) out(i) = (f(i + 1) - f(i - 1)) / (2.0 * dx);
  out(n - 1) = (1.5 * f(n - 1) - 2.0 * f(n - 2) + 0.5 * f(n - 3)) / dx;
  return out;
}

double trapezoid(const Eigen::ArrayXd& f, const Eigen::ArrayXd& x) {
  double s = 0.0;
  for (Eigen::Index i = 0; i + 1 < f.size(); ++i)
    s += 0.5 * (f(i) + f(i + 1)) * (x(i + 1) - x(i));
  return s;
}

}  // namespace

Eigen::ArrayXd kappa_rings_fvk(const ScalarField& v, const PolarGrid& g) {
  check_shape(v, g, "v");
  return kappa_rings_scalar(v.a, g);
}

Eigen::ArrayXd kappa_rings_plate(const Map3& y, const PolarGrid& g) {
  check_shape(y, g, "y");
  Eigen::ArrayXd out = Eigen::ArrayXd::Zero(g.n_r());
  for (const auto& comp : y.c) out += kappa_rings_scalar(comp, g);
  return out;
}

CurvatureProfile kappa_fvk(const ScalarField& v, const PolarGrid& g, double delta,
                           const std::vector<double>& radii) {
  return profile_from_rings(kappa_rings_fvk(v, g), g, delta, radii);
}

CurvatureProfile kappa_plate(const Map3& y, const PolarGrid& g, double delta,
                             const std::vector<double>& radii) {
  return profile_from_rings(kappa_rings_plate(y, g), g, delta, radii);
}

double kappa_interior(const ScalarField& v, const PolarGrid& g, double r) {
  const HessianField h = hessian(v, g);
  ScalarField det;
  det.a = h.xx * h.yy - h.xy.square();
  return integrate_annulus(det, g, g.r(0), r);
}

std::vector<double> dyadic_radii(double r0, double r_max) {
  if (r0 <= 0.0) throw UsageError("dyadic base radius must be positive");
  std::vector<double> out;
  for (double r = r0; r <= r_max * (1.0 + 1e-12); r *= 2.0) out.push_back(r);
  return out;
}

int brouwer_degree(const std::vector<Eigen::Vector2d>& loop, const Eigen::Vector2d& target) {
  const std::size_t n = loop.size();
  if (n < 3) throw UsageError("degree needs at least three loop samples");
  double max_gap = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector2d a = loop[j];
    const Eigen::Vector2d b = loop[(j + 1) % n];
    max_gap = std::max(max_gap, (b - a).norm());
    const Eigen::Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((target - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    min_dist = std::min(min_dist, (a + t * ab - target).norm());
  }
  if (min_dist <= 10.0 * max_gap)
    throw NumericalError("degree target lies on or too close to the sampled curve");
  double total = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const Eigen::Vector2d a = loop[j] - target;
    const Eigen::Vector2d b = loop[(j + 1) % n] - target;
    total += std::atan2(a.x() * b.y() - a.y() * b.x(), a.dot(b));
  }
  const double winding = total / (2.0 * kPi);
  const double rounded = std::round(winding);
  if (std::abs(winding - rounded) >= 0.1)
    throw NumericalError("degree angle sum far from an integer; loop under-resolved");
  return static_cast<int>(rounded);
}

std::vector<Eigen::Vector2d> ring_loop(const VectorField2& f, const PolarGrid& g, int ring) {
  check_shape(f, g, "f");
  if (ring < 0 || ring >= g.n_r()) throw UsageError("ring index out of range");
  std::vector<Eigen::Vector2d> loop(static_cast<std::size_t>(g.n_phi()));
  for (int j = 0; j < g.n_phi(); ++j)
    loop[static_cast<std::size_t>(j)] = Eigen::Vector2d(f.x(ring, j), f.y(ring, j));
  return loop;
}

namespace {

IsoperRecord isoper_from_parts(const Eigen::ArrayXd& tangential_mass,
                               const Eigen::ArrayXd& rings, const PolarGrid& g, double r,
                               double slack) {
  const int k = g.nearest_ring(r);
  IsoperRecord rec;
  rec.radius = g.r(k);
  rec.lhs = tangential_mass(k);
  rec.rhs = std::sqrt(4.0 * kPi * std::abs(rings(k)));
  rec.satisfied = rec.lhs >= rec.rhs * (1.0 - slack);
  return rec;
}

Eigen::ArrayXd tangential_gradient_mass(const Eigen::ArrayXXd& v, const PolarGrid& g) {
  ScalarField f;
  f.a = v;
  const VectorField2 dv = gradient(f, g);
  const Eigen::ArrayXXd tx = stencil::d_phi(g, dv.x);
  const Eigen::ArrayXXd ty = stencil::d_phi(g, dv.y);
  return g.dphi() * (tx.square() + ty.square()).sqrt().rowwise().sum();
}

}  // namespace

IsoperRecord isoper_check(const ScalarField& v, const PolarGrid& g, double r, double slack) {
  check_shape(v, g, "v");
  return isoper_from_parts(tangential_gradient_mass(v.a, g), kappa_rings_fvk(v, g), g, r,
                           slack);
}

IsoperRecord isoper_check(const Map3& y, const PolarGrid& g, double r, double slack) {
  check_shape(y, g, "y");
  Eigen::ArrayXd mass = Eigen::ArrayXd::Zero(g.n_r());
  for (const auto& comp : y.c) mass += tangential_gradient_mass(comp, g);
  return isoper_from_parts(mass, kappa_rings_plate(y, g), g, r, slack);
}

double l1_deviation(const CurvatureProfile& prof, double a, double b) {
  const Knots kn = clip_profile(prof, a, b, identity);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < kn.x.size(); ++i)
    s += 0.5 * (std::abs(kn.k[i] - prof.target) + std::abs(kn.k[i + 1] - prof.target)) *
         (kn.x[i + 1] - kn.x[i]);
  return s;
}

InterpolationRecord interpolation_diagnostic(const VectorField2& u, const ScalarField& v,
                                             const Params& p, const PolarGrid& g, double R) {
  check_shape(u, g, "u");
  check_shape(v, g, "v");
  const Eigen::ArrayXd inv_r = g.radii().inverse();
  const Eigen::ArrayXXd ur =
      scale_cols(u.x, g.cos_phi()) + scale_cols(u.y, g.sin_phi());
  const Eigen::ArrayXXd dur = scale_rows(stencil::d_s(g, ur), inv_r);
  const Eigen::ArrayXXd vr = scale_rows(stencil::d_s(g, v.a), inv_r);
  const Eigen::ArrayXXd vphi = stencil::d_phi(g, v.a);

  const double d2 = p.delta * p.delta;
  const Eigen::ArrayXd ring_a = g.dphi() * (2.0 * dur + vr.square()).rowwise().sum();
  const Eigen::ArrayXd ring_b =
      g.dphi() * (2.0 * ur + scale_rows(vphi.square(), inv_r)).rowwise().sum() +
      2.0 * kPi * d2 * g.radii();

  int k_lo = 0;
  while (k_lo < g.n_r() && g.r(k_lo) < p.h * (1.0 - 1e-12)) ++k_lo;
  int k_hi = g.n_r() - 1;
  while (k_hi >= 0 && g.r(k_hi) > R * (1.0 + 1e-12)) --k_hi;
  const int n = k_hi - k_lo + 1;
  if (n < 6) throw UsageError("interpolation window holds too few rings");

  const Eigen::ArrayXd r_w = g.radii().segment(k_lo, n);
  Eigen::ArrayXd acc(n);
  acc(0) = 0.0;
  for (int i = 1; i < n; ++i)
    acc(i) = acc(i - 1) + 0.5 * (ring_a(k_lo + i - 1) + ring_a(k_lo + i)) *
                              (r_w(i) - r_w(i - 1));
  const Eigen::ArrayXd f_w = 0.5 * (acc - ring_b.segment(k_lo, n));

  const Eigen::ArrayXd kap = kappa_rings_fvk(v, g).segment(k_lo, n);
  const Eigen::ArrayXd fp_fd = d1_uniform(f_w, g.ds()) / r_w;
  const Eigen::ArrayXd fp_id = kap - kPi * d2;
  const Eigen::ArrayXd fpp = d1_uniform(kap, g.ds()) / r_w;

  InterpolationRecord rec;
  rec.r_lo = r_w(0);
  rec.r_hi = r_w(n - 1);
  rec.identity_residual = trapezoid((fp_fd - fp_id).abs(), r_w);
  rec.l1_F = trapezoid(f_w.abs(), r_w);
  rec.l1_Fp = trapezoid(fp_id.abs(), r_w);
  rec.l1_Fpp = trapezoid(fpp.abs(), r_w);
  const double denom = std::sqrt(rec.l1_F * rec.l1_Fpp);
  rec.realized_c = denom > 0.0 ? rec.l1_Fp / denom : 0.0;
  return rec;
}

double lower_bound_certificate(const CurvatureProfile& prof, double a, double b) {
  if (a <= 0.0 || b <= a) throw UsageError("certificate window must satisfy 0 < a < b");
  const Knots kn = clip_profile(prof, a, b, log_abscissa);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < kn.x.size(); ++i)
    s += 0.5 * (std::abs(kn.k[i]) + std::abs(kn.k[i + 1])) * (kn.x[i + 1] - kn.x[i]);
  return 2.0 * s;
}

}  // namespace disclin
