#include "disclin/energy.hpp"

#include <cmath>

#include "disclin/geometry.hpp"
#include "disclin/stencil.hpp"

namespace disclin {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

namespace {

ArrayXXd scale_rows(const ArrayXXd& f, const ArrayXd& s) {
  ArrayXXd out(f.rows(), f.cols());
  for (int k = 0; k < f.rows(); ++k) out.row(k) = f.row(k) * s[k];
  return out;
}

// Cartesian first derivatives of a nodal scalar.
struct Grad {
  ArrayXXd x, y;
};

Grad cart_gradient(const PolarGrid& g, const ArrayXXd& f) {
  const ArrayXd inv_r = g.radii().inverse();
  const ArrayXXd fr = scale_rows(stencil::d_s(g, f), inv_r);
  const ArrayXXd fp_r = scale_rows(stencil::d_phi(g, f), inv_r);
  Grad out;
  out.x.resize(f.rows(), f.cols());
  out.y.resize(f.rows(), f.cols());
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    out.x.col(j) = c * fr.col(j) - s * fp_r.col(j);
    out.y.col(j) = s * fr.col(j) + c * fp_r.col(j);
  }
  return out;
}

// Adjoint of cart_gradient: accumulates into a nodal array.
ArrayXXd cart_gradient_adj(const PolarGrid& g, const ArrayXXd& wx, const ArrayXXd& wy) {
  const ArrayXd inv_r = g.radii().inverse();
  ArrayXXd ws(wx.rows(), wx.cols());
  ArrayXXd wp(wx.rows(), wx.cols());
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    ws.col(j) = c * wx.col(j) + s * wy.col(j);
    wp.col(j) = -s * wx.col(j) + c * wy.col(j);
  }
  return stencil::d_s_adj(g, scale_rows(ws, inv_r)) +
         stencil::d_phi_adj(g, scale_rows(wp, inv_r));
}

// Polar pieces of the Cartesian Hessian.
struct PolarHess {
  ArrayXXd vrr;  // v_rr
  ArrayXXd mix;  // v_rphi/r - v_phi/r^2
  ArrayXXd ang;  // v_phiphi/r^2 + v_r/r
};

PolarHess polar_hessian(const PolarGrid& g, const ArrayXXd& f) {
  const ArrayXd inv_r2 = g.radii().inverse().square();
  const ArrayXXd ds1 = stencil::d_s(g, f);
  PolarHess out;
  out.vrr = scale_rows(stencil::d_ss(g, f) - ds1, inv_r2);
  out.mix = scale_rows(stencil::d_phi(g, ds1) - stencil::d_phi(g, f), inv_r2);
  out.ang = scale_rows(stencil::d_phiphi(g, f) + ds1, inv_r2);
  return out;
}

// Adjoint of polar_hessian given weights on (vrr, mix, ang).
ArrayXXd polar_hessian_adj(const PolarGrid& g, const ArrayXXd& wrr, const ArrayXXd& wmix,
                           const ArrayXXd& wang) {
  const ArrayXd inv_r2 = g.radii().inverse().square();
  const ArrayXXd a = scale_rows(wrr, inv_r2);
  const ArrayXXd b = scale_rows(wmix, inv_r2);
  const ArrayXXd c = scale_rows(wang, inv_r2);
  return stencil::d_ss_adj(g, a) - stencil::d_s_adj(g, a) +
         stencil::d_s_adj(g, stencil::d_phi_adj(g, b)) - stencil::d_phi_adj(g, b) +
         stencil::d_phiphi_adj(g, c) + stencil::d_s_adj(g, c);
}

// Quadrature weight per node, wq(k,j) = r_k w_k dphi.
ArrayXXd node_weights(const PolarGrid& g) {
  ArrayXXd wq(g.n_r(), g.n_phi());
  for (int k = 0; k < g.n_r(); ++k)
    wq.row(k).setConstant(g.r(k) * g.rweights()[k] * g.dphi());
  return wq;
}

// Membrane tensor M = 2 sym Du + Dv (x) Dv + Delta^2 xperp (x) xperp.
struct Membrane {
  ArrayXXd xx, xy, yy;
};

Membrane membrane_tensor(const PolarGrid& g, const Grad& ux, const Grad& uy, const Grad& v,
                         double delta) {
  const double d2 = delta * delta;
  Membrane m;
  m.xx = 2.0 * ux.x + v.x.square();
  m.xy = ux.y + uy.x + v.x * v.y;
  m.yy = 2.0 * uy.y + v.y.square();
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    m.xx.col(j) += d2 * s * s;
    m.xy.col(j) += -d2 * s * c;
    m.yy.col(j) += d2 * c * c;
  }
  return m;
}

double weighted_sum(const PolarGrid& g, const ArrayXXd& density) {
  double total = 0.0;
  for (int k = 0; k < g.n_r(); ++k)
    total += density.row(k).sum() * g.r(k) * g.rweights()[k] * g.dphi();
  return total;
}

}  // namespace

EnergyBreakdown fvk_energy(const VectorField2& u, const ScalarField& v, const Params& p,
                           const PolarGrid& g) {
  check_shape(u, g, "fvk_energy");
  check_shape(v, g, "fvk_energy");
  const Grad gux = cart_gradient(g, u.x);
  const Grad guy = cart_gradient(g, u.y);
  const Grad gv = cart_gradient(g, v.a);
  const Membrane m = membrane_tensor(g, gux, guy, gv, p.delta);
  const PolarHess ph = polar_hessian(g, v.a);

  ArrayXXd mem = m.xx.square() + 2.0 * m.xy.square() + m.yy.square();
  EnergyBreakdown e;
  e.membrane = weighted_sum(g, mem);

  // |D^2 v|^2 = vrr^2 + 2 mix^2 + ang^2 in the rotated frame.
  ArrayXXd ben = ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square();
  e.bending = p.h * p.h * weighted_sum(g, ben);
  e.total = e.membrane + e.bending;
  return e;
}

EnergyBreakdown fvk_gradient(const VectorField2& u, const ScalarField& v, const Params& p,
                             const PolarGrid& g, VectorField2& grad_u, ScalarField& grad_v) {
  check_shape(u, g, "fvk_gradient");
  check_shape(v, g, "fvk_gradient");
  const Grad gux = cart_gradient(g, u.x);
  const Grad guy = cart_gradient(g, u.y);
  const Grad gv = cart_gradient(g, v.a);
  const Membrane m = membrane_tensor(g, gux, guy, gv, p.delta);
  const ArrayXXd wq = node_weights(g);

  // Membrane: dE = sum wq * 4 M : dDu  +  sum wq * 4 (M Dv) . dDv.
  const ArrayXXd axx = 4.0 * wq * m.xx;
  const ArrayXXd axy = 4.0 * wq * m.xy;
  const ArrayXXd ayy = 4.0 * wq * m.yy;
  grad_u.x = cart_gradient_adj(g, axx, axy);
  grad_u.y = cart_gradient_adj(g, axy, ayy);

  const ArrayXXd bx = axx * gv.x + axy * gv.y;
  const ArrayXXd by = axy * gv.x + ayy * gv.y;
  grad_v.a = cart_gradient_adj(g, bx, by);

  // Bending: dE = sum wq * 2 h^2 (vrr dvrr + 2 mix dmix + ang dang).
  const PolarHess ph = polar_hessian(g, v.a);
  const double f = 2.0 * p.h * p.h;
  grad_v.a +=
      polar_hessian_adj(g, f * wq * ph.vrr, 2.0 * f * wq * ph.mix, f * wq * ph.ang);

  EnergyBreakdown e;
  e.membrane = weighted_sum(g, m.xx.square() + 2.0 * m.xy.square() + m.yy.square());
  e.bending =
      p.h * p.h * weighted_sum(g, ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square());
  e.total = e.membrane + e.bending;
  return e;
}

EnergyBreakdown plate_energy(const Map3& y, const Params& p, const PolarGrid& g) {
  check_shape(y, g, "plate_energy");
  std::array<Grad, 3> dy;
  for (int i = 0; i < 3; ++i) dy[i] = cart_gradient(g, y.c[i]);

  // G = Dy^T Dy, U = G - g_Delta.
  ArrayXXd uxx = dy[0].x.square() + dy[1].x.square() + dy[2].x.square();
  ArrayXXd uxy = dy[0].x * dy[0].y + dy[1].x * dy[1].y + dy[2].x * dy[2].y;
  ArrayXXd uyy = dy[0].y.square() + dy[1].y.square() + dy[2].y.square();
  const double d2 = p.delta * p.delta;
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    uxx.col(j) -= 1.0 - d2 * s * s;
    uxy.col(j) -= d2 * s * c;
    uyy.col(j) -= 1.0 - d2 * c * c;
  }

  EnergyBreakdown e;
  e.membrane = weighted_sum(g, uxx.square() + 2.0 * uxy.square() + uyy.square());

  double ben = 0.0;
  for (int i = 0; i < 3; ++i) {
    const PolarHess ph = polar_hessian(g, y.c[i]);
    ben += weighted_sum(g, ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square());
  }
  e.bending = p.h * p.h * ben;
  e.total = e.membrane + e.bending;
  return e;
}

EnergyBreakdown plate_gradient(const Map3& y, const Params& p, const PolarGrid& g,
                               Map3& grad_y) {
  check_shape(y, g, "plate_gradient");
  std::array<Grad, 3> dy;
  for (int i = 0; i < 3; ++i) dy[i] = cart_gradient(g, y.c[i]);

  ArrayXXd uxx = dy[0].x.square() + dy[1].x.square() + dy[2].x.square();
  ArrayXXd uxy = dy[0].x * dy[0].y + dy[1].x * dy[1].y + dy[2].x * dy[2].y;
  ArrayXXd uyy = dy[0].y.square() + dy[1].y.square() + dy[2].y.square();
  const double d2 = p.delta * p.delta;
  for (int j = 0; j < g.n_phi(); ++j) {
    const double c = g.cos_phi()[j], s = g.sin_phi()[j];
    uxx.col(j) -= 1.0 - d2 * s * s;
    uxy.col(j) -= d2 * s * c;
    uyy.col(j) -= 1.0 - d2 * c * c;
  }

  const ArrayXXd wq = node_weights(g);
  const double f = 2.0 * p.h * p.h;
  double ben = 0.0;
  for (int i = 0; i < 3; ++i) {
    // dE_mem/d(Dy_i) = 4 wq (Dy U)_i.
    const ArrayXXd wx = 4.0 * wq * (dy[i].x * uxx + dy[i].y * uxy);
    const ArrayXXd wy = 4.0 * wq * (dy[i].x * uxy + dy[i].y * uyy);
    grad_y.c[i] = cart_gradient_adj(g, wx, wy);

    const PolarHess ph = polar_hessian(g, y.c[i]);
    grad_y.c[i] +=
        polar_hessian_adj(g, f * wq * ph.vrr, 2.0 * f * wq * ph.mix, f * wq * ph.ang);
    ben += weighted_sum(g, ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square());
  }

  EnergyBreakdown e;
  e.membrane = weighted_sum(g, uxx.square() + 2.0 * uxy.square() + uyy.square());
  e.bending = p.h * p.h * ben;
  e.total = e.membrane + e.bending;
  return e;
}

ScalarField bending_density_fvk(const ScalarField& v, const PolarGrid& g) {
  check_shape(v, g, "bending_density_fvk");
  const PolarHess ph = polar_hessian(g, v.a);
  return {ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square()};
}

ScalarField bending_density_plate(const Map3& y, const PolarGrid& g) {
  check_shape(y, g, "bending_density_plate");
  ScalarField out = make_scalar(g);
  for (int i = 0; i < 3; ++i) {
    const PolarHess ph = polar_hessian(g, y.c[i]);
    out.a += ph.vrr.square() + 2.0 * ph.mix.square() + ph.ang.square();
  }
  return out;
}

double dist_SO3(const Eigen::Matrix3d& F) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(F);
  Eigen::Vector3d sv = svd.singularValues();
  if (F.determinant() < 0.0) sv[2] = -sv[2];
  return std::sqrt((sv[0] - 1.0) * (sv[0] - 1.0) + (sv[1] - 1.0) * (sv[1] - 1.0) +
                   (sv[2] - 1.0) * (sv[2] - 1.0));
}

GaussRule gauss_legendre(int n) {
  if (n < 1) throw UsageError("gauss_legendre: order must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      if (n == 1) p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

double kl3d_energy(const Params& p, const PolarGrid& g, int n_gauss) {
  p.validate();
  if (n_gauss < 2) throw UsageError("kl3d_energy: need at least 2 Gauss points in x3");
  const double gamma = p.gamma();
  const GaussRule rule = gauss_legendre(n_gauss);

  double total = 0.0;
  for (int k = 0; k < g.n_r(); ++k) {
    const double r = g.r(k);
    const double wr = g.r(k) * g.rweights()[k] * g.dphi();
    for (int j = 0; j < g.n_phi(); ++j) {
      // z in the unit disk; x = j(z) in the sector.
      const double phiz = g.phi(j);
      const double psi = phiz > M_PI ? phiz - 2.0 * M_PI : phiz;
      const Eigen::Vector2d zv(r * std::cos(phiz), r * std::sin(phiz));
      const Eigen::Vector2d xv(r * std::cos(gamma * psi), r * std::sin(gamma * psi));

      const PlateAnsatz tilde = ansatz_plate(zv, p);
      const SectorJet sj = sector_map(xv, p.delta);

      Matrix32 dyx = tilde.dy * sj.dz;
      Hessian3 d2yx;
      for (int i = 0; i < 3; ++i) {
        d2yx[i] = sj.dz.transpose() * tilde.d2y[i] * sj.dz +
                  tilde.dy(i, 0) * sj.d2z[0] + tilde.dy(i, 1) * sj.d2z[1];
      }

      Eigen::Vector3d nu;
      Matrix32 dnu = Matrix32::Zero();
      const Eigen::Vector3d cr = dyx.col(0).cross(dyx.col(1));
      const double crn = cr.norm();
      if (crn < 1e-14) {
        nu = Eigen::Vector3d::UnitZ();  // degenerate core (flattened region)
      } else {
        nu = cr / crn;
        for (int a = 0; a < 2; ++a) {
          Eigen::Vector3d d1a, d2a;
          for (int i = 0; i < 3; ++i) {
            d1a[i] = d2yx[i](0, a);
            d2a[i] = d2yx[i](1, a);
          }
          const Eigen::Vector3d dcr = d1a.cross(dyx.col(1)) + dyx.col(0).cross(d2a);
          dnu.col(a) = (dcr - nu * nu.dot(dcr)) / crn;
        }
      }

      double thick = 0.0;
      for (int q = 0; q < n_gauss; ++q) {
        const double x3 = 0.5 * p.h * rule.nodes[q];
        Eigen::Matrix3d DY;
        DY.col(0) = dyx.col(0) + x3 * dnu.col(0);
        DY.col(1) = dyx.col(1) + x3 * dnu.col(1);
        DY.col(2) = nu;
        const double d = dist_SO3(DY);
        thick += 0.5 * p.h * rule.weights[q] * d * d;
      }
      total += wr * thick;
    }
  }
  return gamma * total / p.h;
}

}  // namespace disclin
