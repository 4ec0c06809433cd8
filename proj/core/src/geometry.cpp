#include "disclin/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace disclin {

namespace {

void require_off_tip(const Eigen::Vector2d& x) {
  if (x.squaredNorm() == 0.0)
    throw std::domain_error("derivative requested at the cone tip x = 0");
}

}  // namespace

Cutoff cutoff(double t) {
  Cutoff c;
  if (t <= 0.5) return c;
  if (t >= 1.0) {
    c.value = 1.0;
    return c;
  }
  const double s = 2.0 * t - 1.0;
  c.value = s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
  c.d1 = 60.0 * s * s * (1.0 - s) * (1.0 - s);          // d/dt, chain factor 2 folded in
  c.d2 = 240.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
  return c;
}

ConeJet cone_map(const Eigen::Vector2d& x, double delta) {
  require_off_tip(x);
  const double r = x.norm();
  const Eigen::Vector2d xh = x / r;
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  const double g = std::sqrt(1.0 - delta * delta);

  ConeJet jet;
  jet.y << g * x.x(), g * x.y(), delta * r;
  jet.dy.setZero();
  jet.dy(0, 0) = g;
  jet.dy(1, 1) = g;
  jet.dy.row(2) = delta * xh.transpose();
  jet.d2y[0].setZero();
  jet.d2y[1].setZero();
  jet.d2y[2] = (delta / r) * (xp * xp.transpose());
  return jet;
}

Eigen::Matrix2d reference_metric(const Eigen::Vector2d& x, double delta) {
  require_off_tip(x);
  const Eigen::Vector2d xh = x.normalized();
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  return Eigen::Matrix2d::Identity() - delta * delta * (xp * xp.transpose());
}

PlateAnsatz ansatz_plate(const Eigen::Vector2d& x, const Params& p) {
  require_off_tip(x);
  const double r = x.norm();
  const double h = p.h;
  const Eigen::Vector2d xh = x / r;
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  const Eigen::Matrix2d Prr = xh * xh.transpose();
  const Eigen::Matrix2d Ppp = xp * xp.transpose();

  const Cutoff c = cutoff(r / h);
  const ConeJet cone = cone_map(x, p.delta);

  PlateAnsatz a;
  a.y = c.value * cone.y;
  a.dy = (c.d1 / h) * cone.y * xh.transpose() + c.value * cone.dy;
  const Eigen::Matrix2d d2eta = (c.d2 / (h * h)) * Prr + (c.d1 / (h * r)) * Ppp;
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d grad_i = cone.dy.row(i).transpose();
    a.d2y[i] = cone.y(i) * d2eta +
               (c.d1 / h) * (xh * grad_i.transpose() + grad_i * xh.transpose()) +
               c.value * cone.d2y[i];
  }
  return a;
}

FvkAnsatz ansatz_fvk(const Eigen::Vector2d& x, const Params& p) {
  require_off_tip(x);
  const double r = x.norm();
  const double h = p.h;
  const double d2 = p.delta * p.delta;
  const Eigen::Vector2d xh = x / r;
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  const Eigen::Matrix2d Prr = xh * xh.transpose();
  const Eigen::Matrix2d Ppp = xp * xp.transpose();

  const Cutoff c = cutoff(r / h);

  FvkAnsatz a;
  a.u = -(d2 / 2.0) * c.value * x;
  a.du = -(d2 / 2.0) * (c.value * Eigen::Matrix2d::Identity() + (c.d1 * r / h) * Prr);
  a.v = p.delta * c.value * r;
  a.dv = p.delta * (c.d1 * r / h + c.value) * xh;
  a.d2v = p.delta * ((c.d2 * r / (h * h) + 2.0 * c.d1 / h) * Prr +
                     ((c.d1 * r / h + c.value) / r) * Ppp);
  return a;
}

SectorJet sector_map(const Eigen::Vector2d& x, double delta) {
  require_off_tip(x);
  const double r = x.norm();
  const double g = std::sqrt(1.0 - delta * delta);
  const double phi = std::atan2(x.y(), x.x());
  const double tol = 1e-12;
  if (r > 1.0 + tol)
    throw std::domain_error("sector_map: |x| > 1 lies outside B_{1,Delta}");
  if (std::abs(phi) > g * M_PI * (1.0 + tol) + tol)
    throw std::domain_error("sector_map: x lies outside the double sector B_{1,Delta}");

  const Eigen::Vector2d xh = x / r;
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  const double psi = phi / g;
  const Eigen::Vector2d zh(std::cos(psi), std::sin(psi));
  const Eigen::Vector2d zp(-zh.y(), zh.x());

  SectorJet jet;
  jet.z = r * zh;
  jet.dz = zh * xh.transpose() + (1.0 / g) * zp * xp.transpose();
  // D^2 iota = -(Delta^2/(1-Delta^2)) |x|^{-1} zhat (x) xperp (x) xperp
  const double coef = -(delta * delta) / (g * g) / r;
  const Eigen::Matrix2d Ppp = xp * xp.transpose();
  jet.d2z[0] = coef * zh.x() * Ppp;
  jet.d2z[1] = coef * zh.y() * Ppp;
  return jet;
}

Eigen::Vector2d sector_inverse(const Eigen::Vector2d& z, double delta) {
  require_off_tip(z);
  const double r = z.norm();
  const double g = std::sqrt(1.0 - delta * delta);
  if (r > 1.0 + 1e-12)
    throw std::domain_error("sector_inverse: |z| > 1");
  const double psi = std::atan2(z.y(), z.x());
  const double phi = g * psi;
  return r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
}

}  // namespace disclin
