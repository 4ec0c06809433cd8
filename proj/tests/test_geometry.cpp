#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "disclin/geometry.hpp"
#include "disclin/params.hpp"

using namespace disclin;

namespace {

constexpr double kPi = 3.14159265358979323846;

double frob(const Hessian3& d2) {
  double s = 0.0;
  for (const auto& m : d2) s += m.squaredNorm();
  return std::sqrt(s);
}

// FvK membrane integrand |2 sym Du + Dv (x) Dv + Delta^2 xperp (x) xperp|^2.
double fvk_membrane_density(const FvkAnsatz& a, const Eigen::Vector2d& x, double delta) {
  const Eigen::Vector2d xh = x.normalized();
  const Eigen::Vector2d xp(-xh.y(), xh.x());
  const Eigen::Matrix2d m = a.du + a.du.transpose() + a.dv * a.dv.transpose() +
                            delta * delta * xp * xp.transpose();
  return m.squaredNorm();
}

double plate_membrane_density(const PlateAnsatz& a, const Eigen::Vector2d& x, double delta) {
  const Eigen::Matrix2d m = a.dy.transpose() * a.dy - reference_metric(x, delta);
  return m.squaredNorm();
}

}  // namespace

TEST_CASE("cutoff ramp values and jet") {
  CHECK(cutoff(0.4).value == 0.0);
  CHECK(cutoff(0.4).d1 == 0.0);
  CHECK(cutoff(0.4).d2 == 0.0);
  CHECK(cutoff(1.2).value == 1.0);
  CHECK(cutoff(1.2).d1 == 0.0);
  CHECK(cutoff(1.2).d2 == 0.0);
  CHECK(cutoff(0.75).value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(cutoff(0.75).d1 == doctest::Approx(3.75).epsilon(1e-12));

  // C^2 across the junctions.
  for (double t : {0.5, 1.0}) {
    for (double side : {-1e-9, 1e-9}) {
      const Cutoff c = cutoff(t + side);
      CHECK(std::abs(c.value - cutoff(t).value) < 1e-7);
      CHECK(std::abs(c.d1 - cutoff(t).d1) < 1e-6);
      CHECK(std::abs(c.d2 - cutoff(t).d2) < 1e-5);
    }
  }

  // Finite differences confirm the analytic derivatives.
  const double step = 1e-5;
  for (double t = 0.52; t < 0.99; t += 0.037) {
    const double fd1 = (cutoff(t + step).value - cutoff(t - step).value) / (2 * step);
    const double fd2 = (cutoff(t + step).d1 - cutoff(t - step).d1) / (2 * step);
    CHECK(cutoff(t).d1 == doctest::Approx(fd1).epsilon(1e-6));
    CHECK(cutoff(t).d2 == doctest::Approx(fd2).epsilon(1e-6));
  }

  // Bounds used when sizing the core: sup|eta'| = 3.75, sup|eta''| < 24.
  double sup1 = 0.0, sup2 = 0.0;
  for (double t = 0.5; t <= 1.0; t += 1e-4) {
    sup1 = std::max(sup1, std::abs(cutoff(t).d1));
    sup2 = std::max(sup2, std::abs(cutoff(t).d2));
  }
  CHECK(sup1 == doctest::Approx(3.75).epsilon(1e-6));
  CHECK(sup2 < 24.0);
  CHECK(sup2 > 20.0);
}

TEST_CASE("cone map closed forms") {
  const ConeJet j = cone_map(Eigen::Vector2d(1.0, 0.0), 0.6);
  CHECK(j.y.x() == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(j.y.y() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(j.y.z() == doctest::Approx(0.6).epsilon(1e-14));

  const ConeJet flat = cone_map(Eigen::Vector2d(0.3, -0.7), 0.0);
  CHECK(flat.y.x() == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(flat.y.y() == doctest::Approx(-0.7).epsilon(1e-14));
  CHECK(flat.y.z() == 0.0);
  CHECK(frob(flat.d2y) == 0.0);

  CHECK(frob(cone_map(Eigen::Vector2d(0.5, 0.0), 0.6).d2y) ==
        doctest::Approx(1.2).epsilon(1e-12));
}

TEST_CASE("cone map jets match finite differences") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ur(0.2, 0.9), uphi(0.0, 2 * kPi);
  const double step = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const double r = ur(rng), phi = uphi(rng), delta = 0.1 + 0.8 * ur(rng);
    const Eigen::Vector2d x(r * std::cos(phi), r * std::sin(phi));
    const ConeJet j = cone_map(x, delta);
    for (int a = 0; a < 2; ++a) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(a) = step;
      const ConeJet jp = cone_map(x + e, delta), jm = cone_map(x - e, delta);
      const Eigen::Vector3d fd = (jp.y - jm.y) / (2 * step);
      CHECK((j.dy.col(a) - fd).norm() < 1e-8);
      const Matrix32 fdd = (jp.dy - jm.dy) / (2 * step);
      for (int i = 0; i < 3; ++i)
        for (int b = 0; b < 2; ++b) CHECK(std::abs(j.d2y[i](a, b) - fdd(i, b)) < 1e-7);
    }
  }
}

TEST_CASE("reference metric") {
  const Eigen::Matrix2d g = reference_metric(Eigen::Vector2d(0.0, 1.0), 0.6);
  CHECK(g(0, 0) == doctest::Approx(0.64).epsilon(1e-14));
  CHECK(g(1, 1) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(g(0, 1)) < 1e-15);

  CHECK((reference_metric(Eigen::Vector2d(0.3, -0.2), 0.0) - Eigen::Matrix2d::Identity())
            .norm() < 1e-15);

  // Pullback metric of the cone map equals the reference metric.
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Vector2d x(u(rng), u(rng));
    if (x.norm() < 0.05) continue;
    const double delta = 0.3 + 0.35 * (u(rng) + 1.0);
    const ConeJet j = cone_map(x, delta);
    const Eigen::Matrix2d pull = j.dy.transpose() * j.dy;
    CHECK((pull - reference_metric(x, delta)).norm() < 1e-13);
  }
}

TEST_CASE("plate ansatz: exact cone outside the core, zero inside half-core") {
  Params p;
  p.h = 0.05;
  p.delta = 0.5;
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> uphi(0.0, 2 * kPi);
  for (int trial = 0; trial < 30; ++trial) {
    const double phi = uphi(rng);
    const Eigen::Vector2d xout(0.06 * std::cos(phi), 0.06 * std::sin(phi));
    CHECK(plate_membrane_density(ansatz_plate(xout, p), xout, p.delta) < 1e-26);
    const Eigen::Vector2d xin(0.02 * std::cos(phi), 0.02 * std::sin(phi));
    const PlateAnsatz a = ansatz_plate(xin, p);
    CHECK(a.y.norm() == 0.0);
    CHECK(a.dy.norm() == 0.0);
    CHECK(frob(a.d2y) == 0.0);
  }
}

TEST_CASE("plate ansatz: core membrane density is h independent") {
  // y0 = eta(|x|/h) y^Delta with y^Delta 1-homogeneous, so the density at
  // x = t h xhat depends on (t, xhat) only.
  Params p1, p2;
  p1.h = 0.1;
  p2.h = 0.01;
  p1.delta = p2.delta = 0.5;
  double sup1 = 0.0, sup2 = 0.0;
  for (double t = 0.5; t <= 1.0; t += 0.01) {
    for (double phi = 0.0; phi < 2 * kPi; phi += 0.3) {
      const Eigen::Vector2d d(std::cos(phi), std::sin(phi));
      sup1 = std::max(sup1, plate_membrane_density(ansatz_plate(t * p1.h * d, p1), t * p1.h * d,
                                                   p1.delta));
      sup2 = std::max(sup2, plate_membrane_density(ansatz_plate(t * p2.h * d, p2), t * p2.h * d,
                                                   p2.delta));
    }
  }
  CHECK(sup1 == doctest::Approx(sup2).epsilon(1e-9));
  CHECK(sup1 < 200.0);
  CHECK(sup1 > 0.0);
}

TEST_CASE("fvk ansatz closed forms") {
  Params p;
  p.h = 0.05;
  p.delta = 0.5;
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> uphi(0.0, 2 * kPi), ur(0.06, 0.95);
  for (int trial = 0; trial < 30; ++trial) {
    const double phi = uphi(rng), r = ur(rng);
    const Eigen::Vector2d x(r * std::cos(phi), r * std::sin(phi));
    const FvkAnsatz a = ansatz_fvk(x, p);
    CHECK(fvk_membrane_density(a, x, p.delta) < 1e-26);
    CHECK(a.d2v.squaredNorm() ==
          doctest::Approx(p.delta * p.delta / (r * r)).epsilon(1e-10));
  }
  const FvkAnsatz inside = ansatz_fvk(Eigen::Vector2d(0.015, -0.01), p);
  CHECK(inside.u.norm() == 0.0);
  CHECK(inside.v == 0.0);
  CHECK(inside.du.norm() == 0.0);
  CHECK(inside.dv.norm() == 0.0);
}

TEST_CASE("fvk ansatz jets match finite differences") {
  Params p;
  p.h = 0.2;  // wide ramp so samples land inside it
  p.delta = 0.5;
  std::mt19937 rng(13);
  std::uniform_real_distribution<double> ur(0.11, 0.9), uphi(0.0, 2 * kPi);
  const double step = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    const double r = ur(rng), phi = uphi(rng);
    const Eigen::Vector2d x(r * std::cos(phi), r * std::sin(phi));
    const FvkAnsatz a = ansatz_fvk(x, p);
    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(c) = step;
      const FvkAnsatz ap = ansatz_fvk(x + e, p), am = ansatz_fvk(x - e, p);
      CHECK((a.du.col(c) - (ap.u - am.u) / (2 * step)).norm() < 1e-7);
      CHECK(std::abs(a.dv(c) - (ap.v - am.v) / (2 * step)) < 1e-8);
      CHECK((a.d2v.col(c) - (ap.dv - am.dv) / (2 * step)).norm() < 1e-7);
    }
  }
}

TEST_CASE("sector chart") {
  const double delta = 0.6;
  const double gamma = std::sqrt(1.0 - delta * delta);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ur(0.05, 1.0), ua(-0.95, 0.95);
  const double step = 1e-6;
  for (int trial = 0; trial < 25; ++trial) {
    const double r = ur(rng);
    const double ang = ua(rng) * gamma * kPi;
    const Eigen::Vector2d x(r * std::cos(ang), r * std::sin(ang));
    const SectorJet s = sector_map(x, delta);
    CHECK(s.z.norm() == doctest::Approx(r).epsilon(1e-12));
    CHECK(s.dz.determinant() == doctest::Approx(1.0 / gamma).epsilon(1e-10));
    CHECK((sector_inverse(s.z, delta) - x).norm() < 1e-10);

    for (int c = 0; c < 2; ++c) {
      Eigen::Vector2d e = Eigen::Vector2d::Zero();
      e(c) = step;
      const SectorJet sp = sector_map(x + e, delta), sm = sector_map(x - e, delta);
      CHECK((s.dz.col(c) - (sp.z - sm.z) / (2 * step)).norm() < 1e-7);
      const Eigen::Matrix2d fdd = (sp.dz - sm.dz) / (2 * step);
      for (int l = 0; l < 2; ++l)
        for (int b = 0; b < 2; ++b) CHECK(std::abs(s.d2z[l](b, c) - fdd(l, b)) < 1e-6);
    }
  }
  const SectorJet id = sector_map(Eigen::Vector2d(0.4, 0.3), 0.0);
  CHECK((id.z - Eigen::Vector2d(0.4, 0.3)).norm() < 1e-14);
  CHECK((id.dz - Eigen::Matrix2d::Identity()).norm() < 1e-12);
}
