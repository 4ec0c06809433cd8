#include "disclin/grid.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "disclin/stencil.hpp"

namespace disclin {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

PolarGrid::PolarGrid(int n_r, int n_phi, double r_min)
    : n_r_(n_r), n_phi_(n_phi), r_min_(r_min) {
  if (n_r < 8) throw UsageError("PolarGrid: n_r must be >= 8, got " + std::to_string(n_r));
  if (n_phi < 8) throw UsageError("PolarGrid: n_phi must be >= 8, got " + std::to_string(n_phi));
  if (!(r_min > 0.0) || !(r_min < 1.0))
    throw UsageError("PolarGrid: r_min must lie in (0,1), got " + std::to_string(r_min));

  dphi_ = 2.0 * M_PI / n_phi;
  ds_ = -std::log(r_min) / (n_r - 1);
  r_.resize(n_r);
  for (int k = 0; k < n_r; ++k) r_[k] = std::exp(std::log(r_min) + k * ds_);
  r_[n_r - 1] = 1.0;

  w_.resize(n_r);
  w_[0] = 0.5 * (r_[1] - r_[0]);
  for (int k = 1; k < n_r - 1; ++k) w_[k] = 0.5 * (r_[k + 1] - r_[k - 1]);
  w_[n_r - 1] = 0.5 * (r_[n_r - 1] - r_[n_r - 2]);

  cphi_.resize(n_phi);
  sphi_.resize(n_phi);
  for (int j = 0; j < n_phi; ++j) {
    cphi_[j] = std::cos(phi(j));
    sphi_[j] = std::sin(phi(j));
  }
}

int PolarGrid::nearest_ring(double r) const {
  if (!(r > 0.0)) throw std::domain_error("nearest_ring: r must be positive");
  const double k = (std::log(r) - std::log(r_min_)) / ds_;
  const int ki = int(std::lround(k));
  return std::max(0, std::min(n_r_ - 1, ki));
}

ScalarField make_scalar(const PolarGrid& g) {
  return {ArrayXXd::Zero(g.n_r(), g.n_phi())};
}

VectorField2 make_vector2(const PolarGrid& g) {
  return {ArrayXXd::Zero(g.n_r(), g.n_phi()), ArrayXXd::Zero(g.n_r(), g.n_phi())};
}

Map3 make_map3(const PolarGrid& g) {
  Map3 m;
  for (auto& c : m.c) c = ArrayXXd::Zero(g.n_r(), g.n_phi());
  return m;
}

void check_shape(const ArrayXXd& a, const PolarGrid& g, const char* what) {
  if (a.rows() != g.n_r() || a.cols() != g.n_phi())
    throw UsageError(std::string(what) + ": field shape (" + std::to_string(a.rows()) + "," +
                     std::to_string(a.cols()) + ") does not match grid (" +
                     std::to_string(g.n_r()) + "," + std::to_string(g.n_phi()) + ")");
}

void check_shape(const ScalarField& f, const PolarGrid& g, const char* what) {
  check_shape(f.a, g, what);
}

void check_shape(const VectorField2& f, const PolarGrid& g, const char* what) {
  check_shape(f.x, g, what);
  check_shape(f.y, g, what);
}

void check_shape(const Map3& f, const PolarGrid& g, const char* what) {
  for (const auto& c : f.c) check_shape(c, g, what);
}

namespace {

ArrayXXd scale_rows(const ArrayXXd& f, const ArrayXd& s) {
  ArrayXXd out(f.rows(), f.cols());
  for (int k = 0; k < f.rows(); ++k) out.row(k) = f.row(k) * s[k];
  return out;
}

}  // namespace

VectorField2 gradient(const ScalarField& v, const PolarGrid& g) {
  check_shape(v, g, "gradient");
  const ArrayXd inv_r = g.radii().inverse();
  const ArrayXXd vr = scale_rows(stencil::d_s(g, v.a), inv_r);
  const ArrayXXd vp_r = scale_rows(stencil::d_phi(g, v.a), inv_r);

  VectorField2 out = make_vector2(g);
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    out.x.col(j) = c * vr.col(j) - s * vp_r.col(j);
    out.y.col(j) = s * vr.col(j) + c * vp_r.col(j);
  }
  return out;
}

HessianField hessian(const ScalarField& v, const PolarGrid& g) {
  check_shape(v, g, "hessian");
  const ArrayXd inv_r2 = g.radii().inverse().square();
  const ArrayXXd ds1 = stencil::d_s(g, v.a);
  const ArrayXXd dss = stencil::d_ss(g, v.a);
  const ArrayXXd dp = stencil::d_phi(g, v.a);
  const ArrayXXd dpp = stencil::d_phiphi(g, v.a);
  const ArrayXXd dsp = stencil::d_phi(g, ds1);

  const ArrayXXd vrr = scale_rows(dss - ds1, inv_r2);
  const ArrayXXd mix = scale_rows(dsp - dp, inv_r2);   // v_rphi/r - v_phi/r^2
  const ArrayXXd ang = scale_rows(dpp + ds1, inv_r2);  // v_phiphi/r^2 + v_r/r

  HessianField out;
  out.xx.resize(g.n_r(), g.n_phi());
  out.xy.resize(g.n_r(), g.n_phi());
  out.yy.resize(g.n_r(), g.n_phi());
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    out.xx.col(j) = c * c * vrr.col(j) - 2.0 * c * s * mix.col(j) + s * s * ang.col(j);
    out.xy.col(j) = c * s * vrr.col(j) + (c * c - s * s) * mix.col(j) - c * s * ang.col(j);
    out.yy.col(j) = s * s * vrr.col(j) + 2.0 * c * s * mix.col(j) + c * c * ang.col(j);
  }
  return out;
}

double integrate(const ScalarField& density, const PolarGrid& g) {
  check_shape(density, g, "integrate");
  double total = 0.0;
  for (int k = 0; k < g.n_r(); ++k)
    total += density.a.row(k).sum() * g.r(k) * g.rweights()[k] * g.dphi();
  return total;
}

double integrate_annulus(const ScalarField& density, const PolarGrid& g, double a, double b) {
  check_shape(density, g, "integrate_annulus");
  const double lo = std::max(a, g.r(0));
  const double hi = std::min(b, g.r(g.n_r() - 1));
  if (!(hi > lo)) return 0.0;

  // Ring linear density L(r_k) = r_k * dphi * sum_j density(k,j), integrated
  // piecewise linearly in r over [lo, hi].
  ArrayXd L(g.n_r());
  for (int k = 0; k < g.n_r(); ++k) L[k] = density.a.row(k).sum() * g.r(k) * g.dphi();

  auto interp = [&](double r) {
    int k = 0;
    while (k + 2 < g.n_r() && g.r(k + 1) < r) ++k;
    const double t = (r - g.r(k)) / (g.r(k + 1) - g.r(k));
    return (1.0 - t) * L[k] + t * L[k + 1];
  };

  std::vector<double> knots{lo};
  std::vector<double> vals{interp(lo)};
  for (int k = 0; k < g.n_r(); ++k) {
    if (g.r(k) > lo && g.r(k) < hi) {
      knots.push_back(g.r(k));
      vals.push_back(L[k]);
    }
  }
  knots.push_back(hi);
  vals.push_back(interp(hi));

  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i)
    total += 0.5 * (vals[i] + vals[i + 1]) * (knots[i + 1] - knots[i]);
  return total;
}

RingIntegral circle_integral(const ScalarField& f, const PolarGrid& g, double r) {
  check_shape(f, g, "circle_integral");
  if (!(r >= g.r_min() * (1.0 - 1e-12)) || !(r <= 1.0 + 1e-12))
    throw std::domain_error("circle_integral: radius " + std::to_string(r) +
                            " outside grid range [" + std::to_string(g.r_min()) + ", 1]");
  const double s = std::log(r);
  const double pos = (s - std::log(g.r_min())) / g.ds();
  const int k = std::max(0, std::min(g.n_r() - 1, int(std::lround(pos))));

  RingIntegral out;
  if (std::abs(pos - k) < 1e-9) {
    out.value = g.r(k) * g.dphi() * f.a.row(k).sum();
    return out;
  }
  const int k0 = std::max(0, std::min(g.n_r() - 2, int(std::floor(pos))));
  const double t = pos - k0;
  const double ring0 = f.a.row(k0).sum();
  const double ring1 = f.a.row(k0 + 1).sum();
  out.value = r * g.dphi() * ((1.0 - t) * ring0 + t * ring1);
  out.interpolated = true;
  return out;
}

namespace {

// Catmull-Rom on samples p[-1..2] at parameter t in [0,1].
inline double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * (2.0 * p1 + t * ((p2 - p0) +
                t * ((2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) +
                t * (3.0 * (p1 - p2) + p3 - p0))));
}

}  // namespace

ScalarField resample(const ScalarField& f, const PolarGrid& from, const PolarGrid& to) {
  check_shape(f, from, "resample");

  // Radial pass (clamped in s = log r).
  const double s0 = std::log(from.r_min());
  ArrayXXd mid(to.n_r(), from.n_phi());
  for (int k = 0; k < to.n_r(); ++k) {
    const double pos = (std::log(to.r(k)) - s0) / from.ds();
    if (pos <= 0.0) {
      mid.row(k) = f.a.row(0);
      continue;
    }
    if (pos >= from.n_r() - 1) {
      mid.row(k) = f.a.row(from.n_r() - 1);
      continue;
    }
    const int i = int(std::floor(pos));
    const double t = pos - i;
    const int im = std::max(0, i - 1);
    const int ip = std::min(from.n_r() - 1, i + 1);
    const int ipp = std::min(from.n_r() - 1, i + 2);
    for (int j = 0; j < from.n_phi(); ++j)
      mid(k, j) = catmull_rom(f.a(im, j), f.a(i, j), f.a(ip, j), f.a(ipp, j), t);
  }

  if (from.n_phi() == to.n_phi()) return {mid};

  // Angular pass (periodic).
  ArrayXXd out(to.n_r(), to.n_phi());
  const int m = from.n_phi();
  for (int j = 0; j < to.n_phi(); ++j) {
    const double pos = to.phi(j) / from.dphi();
    const int i = int(std::floor(pos)) % m;
    const double t = pos - std::floor(pos);
    const int im = (i + m - 1) % m;
    const int ip = (i + 1) % m;
    const int ipp = (i + 2) % m;
    for (int k = 0; k < to.n_r(); ++k)
      out(k, j) = catmull_rom(mid(k, im), mid(k, i), mid(k, ip), mid(k, ipp), t);
  }
  return {out};
}

}  // namespace disclin
