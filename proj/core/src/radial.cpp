#include "disclin/radial.hpp"

#include <cmath>
#include <random>

#include "disclin/errors.hpp"
#include "disclin/geometry.hpp"
#include "disclin/stencil.hpp"

namespace disclin {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct RadialDerivs {
  Eigen::ArrayXd up;   // u'
  Eigen::ArrayXd vp;   // v'
  Eigen::ArrayXd vpp;  // v''
};

Eigen::ArrayXXd col_mat(const Eigen::ArrayXd& c) {
  Eigen::ArrayXXd m(c.size(), 1);
  m.col(0) = c;
  return m;
}

RadialDerivs derivs(const RadialFields& f, const PolarGrid& g) {
  const Eigen::ArrayXd& r = g.radii();
  const Eigen::ArrayXXd u = col_mat(f.u);
  const Eigen::ArrayXXd v = col_mat(f.v);
  RadialDerivs d;
  d.up = stencil::d_s(g, u).col(0) / r;
  d.vp = stencil::d_s(g, v).col(0) / r;
  d.vpp = (stencil::d_ss(g, v).col(0) - stencil::d_s(g, v).col(0)) / r.square();
  return d;
}

void check_radial(const RadialFields& f, const PolarGrid& g) {
  if (f.u.size() != g.n_r() || f.v.size() != g.n_r())
    throw UsageError("radial field size does not match the grid");
}

}  // namespace

RadialFields radial_ansatz(const Params& p, const PolarGrid& g) {
  RadialFields f;
  f.u.resize(g.n_r());
  f.v.resize(g.n_r());
  for (int k = 0; k < g.n_r(); ++k) {
    const FvkAnsatz a = ansatz_fvk(Eigen::Vector2d(g.r(k), 0.0), p);
    f.u(k) = a.u(0);
    f.v(k) = a.v;
  }
  return f;
}

EnergyBreakdown radial_fvk_energy(const RadialFields& f, const Params& p, const PolarGrid& g) {
  check_radial(f, g);
  const Eigen::ArrayXd& r = g.radii();
  const Eigen::ArrayXd w = 2.0 * kPi * g.rweights() * r;
  const RadialDerivs d = derivs(f, g);
  const Eigen::ArrayXd pp = 2.0 * d.up + d.vp.square();
  const Eigen::ArrayXd qq = 2.0 * f.u / r + p.delta * p.delta;
  EnergyBreakdown e;
  e.membrane = (w * (pp.square() + qq.square())).sum();
  e.bending = p.h * p.h * (w * (d.vpp.square() + (d.vp / r).square())).sum();
  e.total = e.membrane + e.bending;
  return e;
}

EnergyBreakdown radial_fvk_gradient(const RadialFields& f, const Params& p,
                                    const PolarGrid& g, RadialFields& grad) {
  check_radial(f, g);
  const Eigen::ArrayXd& r = g.radii();
  const Eigen::ArrayXd w = 2.0 * kPi * g.rweights() * r;
  const RadialDerivs d = derivs(f, g);
  const Eigen::ArrayXd pp = 2.0 * d.up + d.vp.square();
  const Eigen::ArrayXd qq = 2.0 * f.u / r + p.delta * p.delta;
  const double h2 = p.h * p.h;

  EnergyBreakdown e;
  e.membrane = (w * (pp.square() + qq.square())).sum();
  e.bending = h2 * (w * (d.vpp.square() + (d.vp / r).square())).sum();
  e.total = e.membrane + e.bending;

  auto adj_s = [&g](const Eigen::ArrayXd& c) {
    return stencil::d_s_adj(g, col_mat(c)).col(0).eval();
  };
  auto adj_ss = [&g](const Eigen::ArrayXd& c) {
    return stencil::d_ss_adj(g, col_mat(c)).col(0).eval();
  };

  grad.u = adj_s(4.0 * w * pp / r) + 4.0 * w * qq / r;
  const Eigen::ArrayXd b_vpp = 2.0 * h2 * w * d.vpp / r.square();
  grad.v = adj_s(4.0 * w * pp * d.vp / r) + adj_ss(b_vpp) - adj_s(b_vpp) +
           adj_s(2.0 * h2 * w * (d.vp / r) / r.square());
  return e;
}

RadialResult radial_minimize(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg) {
  const int n = g.n_r();
  const RadialFields start = radial_ansatz(p, g);
  Eigen::VectorXd x(2 * n);
  x.head(n) = start.u.matrix();
  x.tail(n) = start.v.matrix();

  const Oracle oracle = [&p, &g, n](const Eigen::VectorXd& xv, Eigen::VectorXd& gv) {
    RadialFields f;
    f.u = xv.head(n).array();
    f.v = xv.tail(n).array();
    RadialFields df;
    const EnergyBreakdown e = radial_fvk_gradient(f, p, g, df);
    gv.resize(2 * n);
    gv.head(n) = df.u.matrix();
    gv.tail(n) = df.v.matrix();
    return e.total;
  };
  const PostStep post = [n](Eigen::VectorXd& xv) {
    xv.tail(n).array() -= xv.tail(n).mean();
  };

  RadialResult res;
  if (cfg.restarts <= 0) {
    res.report = minimize(oracle, x, cfg, post);
  } else {
    const double amp = cfg.perturb_amplitude * std::max(x.lpNorm<Eigen::Infinity>(), 1e-3);
    const double s0 = std::log(g.r(0));
    const double span = std::log(g.r(n - 1)) - s0;
    const Perturber perturber = [&g, n, amp, s0, span](int restart, std::uint64_t seed) {
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (restart + 1)));
      std::normal_distribution<double> normal;
      Eigen::VectorXd dx(2 * n);
      for (int block = 0; block < 2; ++block)
        for (int k = 0; k < n; ++k) {
          const double shat = (std::log(g.r(k)) - s0) / span;
          double val = 0.0;
          for (int m = 1; m <= 3; ++m) val += normal(rng) * std::sin(kPi * m * shat);
          dx(block * n + k) = val;
        }
      const double sup = dx.lpNorm<Eigen::Infinity>();
      if (sup > 0.0) dx *= amp / sup;
      return dx;
    };
    res.report = minimize_with_restarts(oracle, x, cfg, perturber, post);
  }
  res.fields.u = x.head(n).array();
  res.fields.v = x.tail(n).array();
  res.energy = radial_fvk_energy(res.fields, p, g);
  return res;
}

FvkState lift_to_2d(const RadialFields& f, const PolarGrid& from, const PolarGrid& to) {
  check_radial(f, from);
  const double tol = 1e-9;
  if (to.r(0) < from.r(0) * (1.0 - tol) ||
      to.r(to.n_r() - 1) > from.r(from.n_r() - 1) * (1.0 + tol))
    throw UsageError("lift target radii leave the radial profile range");

  FvkState on_from;
  on_from.u = make_vector2(from);
  on_from.v = make_scalar(from);
  for (int k = 0; k < from.n_r(); ++k)
    for (int j = 0; j < from.n_phi(); ++j) {
      on_from.u.x(k, j) = f.u(k) * from.cos_phi()(j);
      on_from.u.y(k, j) = f.u(k) * from.sin_phi()(j);
      on_from.v.a(k, j) = f.v(k);
    }
  return resample_fields(on_from, from, to);
}

}  // namespace disclin
