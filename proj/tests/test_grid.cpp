#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <functional>

#include "disclin/grid.hpp"
#include "disclin/stencil.hpp"

using namespace disclin;

namespace {

constexpr double kPi = 3.14159265358979323846;

ScalarField sample(const PolarGrid& g, const std::function<double(double, double)>& f) {
  ScalarField v = make_scalar(g);
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) v.a(k, j) = f(g.r(k), g.phi(j));
  return v;
}

double sup_gradient_error(const PolarGrid& g, const VectorField2& got,
                          const std::function<Eigen::Vector2d(double, double)>& exact) {
  double sup = 0.0;
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      const Eigen::Vector2d e = exact(g.r(k), g.phi(j));
      sup = std::max(sup, std::hypot(got.x(k, j) - e.x(), got.y(k, j) - e.y()));
    }
  return sup;
}

}  // namespace

TEST_CASE("grid layout") {
  const PolarGrid g(33, 64, 0.1);
  CHECK(g.r(0) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(g.r(32) == doctest::Approx(1.0).epsilon(1e-14));
  // log-uniform spacing
  for (int k = 1; k < g.n_r(); ++k)
    CHECK(std::log(g.r(k)) - std::log(g.r(k - 1)) == doctest::Approx(g.ds()).epsilon(1e-12));
  CHECK(g.size() == 33 * 64);
  CHECK(g.phi(0) == 0.0);
  CHECK(g.dphi() == doctest::Approx(2 * kPi / 64).epsilon(1e-14));

  CHECK(g.nearest_ring(g.r(7)) == 7);
  CHECK(g.nearest_ring(0.0999) == 0);
  CHECK(g.nearest_ring(2.0) == 32);

  CHECK_THROWS_AS(PolarGrid(1, 64, 0.1), UsageError);
  CHECK_THROWS_AS(PolarGrid(33, 64, 1.5), UsageError);
}

TEST_CASE("annulus integration") {
  const PolarGrid g(129, 64, 0.05);
  const ScalarField one = sample(g, [](double, double) { return 1.0; });
  CHECK(integrate(one, g) ==
        doctest::Approx(kPi * (1.0 - 0.05 * 0.05)).epsilon(2e-4));

  const ScalarField inv2 = sample(g, [](double r, double) { return 1.0 / (r * r); });
  CHECK(integrate(inv2, g) == doctest::Approx(2 * kPi * std::log(1.0 / 0.05)).epsilon(2e-4));

  const ScalarField cosphi = sample(g, [](double, double phi) { return std::cos(phi); });
  CHECK(std::abs(integrate(cosphi, g)) < 1e-12);

  CHECK(integrate_annulus(inv2, g, 0.2, 0.7) ==
        doctest::Approx(2 * kPi * std::log(0.7 / 0.2)).epsilon(5e-4));
  // clipped to the grid range
  CHECK(integrate_annulus(one, g, 0.0, 2.0) == doctest::Approx(integrate(one, g)).epsilon(1e-12));
}

TEST_CASE("circle integrals") {
  const PolarGrid g(33, 128, 0.1);
  const ScalarField one = sample(g, [](double, double) { return 1.0; });
  const RingIntegral on = circle_integral(one, g, g.r(20));
  CHECK_FALSE(on.interpolated);
  CHECK(on.value == doctest::Approx(2 * kPi * g.r(20)).epsilon(1e-12));

  const RingIntegral off = circle_integral(one, g, 0.5);
  CHECK(off.interpolated);
  CHECK(off.value == doctest::Approx(2 * kPi * 0.5).epsilon(2e-3));

  const ScalarField cosphi = sample(g, [](double, double phi) { return std::cos(phi); });
  CHECK(std::abs(circle_integral(cosphi, g, 0.5).value) < 1e-12);

  const ScalarField cos2 = sample(g, [](double, double phi) {
    return std::cos(phi) * std::cos(phi);
  });
  CHECK(circle_integral(cos2, g, 1.0).value == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("gradient stencils") {
  const PolarGrid g(65, 128, 0.1);
  const ScalarField x1 = sample(g, [](double r, double phi) { return r * std::cos(phi); });
  CHECK(sup_gradient_error(g, gradient(x1, g), [](double, double) {
          return Eigen::Vector2d(1.0, 0.0);
        }) < 2e-3);

  const ScalarField c = sample(g, [](double, double) { return 3.7; });
  CHECK(sup_gradient_error(g, gradient(c, g), [](double, double) {
          return Eigen::Vector2d(0.0, 0.0);
        }) < 1e-12);
}

TEST_CASE("gradient refinement order") {
  auto err_at = [](int n_r, int n_phi) {
    const PolarGrid g(n_r, n_phi, 0.1);
    const ScalarField f = sample(g, [](double r, double) { return 0.5 * r * r; });
    return sup_gradient_error(g, gradient(f, g), [](double r, double phi) {
      return Eigen::Vector2d(r * std::cos(phi), r * std::sin(phi));
    });
  };
  const double e1 = err_at(33, 64);
  const double e2 = err_at(65, 128);
  CHECK(std::log2(e1 / e2) >= 1.9);
}

TEST_CASE("hessian stencils") {
  const PolarGrid g(97, 192, 0.1);
  const ScalarField q = sample(g, [](double r, double phi) {
    const double x = r * std::cos(phi);
    return 0.5 * x * x;
  });
  const HessianField hq = hessian(q, g);
  double sup = 0.0;
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      sup = std::max(sup, std::abs(hq.xx(k, j) - 1.0));
      sup = std::max(sup, std::abs(hq.xy(k, j)));
      sup = std::max(sup, std::abs(hq.yy(k, j)));
    }
  CHECK(sup < 5e-3);

  const double delta = 0.6;
  const ScalarField cone = sample(g, [&](double r, double) { return delta * r; });
  const HessianField hc = hessian(cone, g);
  sup = 0.0;
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      const double c = std::cos(g.phi(j)), s = std::sin(g.phi(j));
      const double f = delta / g.r(k);  // (delta/r) xperp (x) xperp
      sup = std::max({sup, std::abs(hc.xx(k, j) - f * s * s) / f,
                      std::abs(hc.xy(k, j) + f * s * c) / f,
                      std::abs(hc.yy(k, j) - f * c * c) / f});
    }
  CHECK(sup < 5e-3);

  const ScalarField r2 = sample(g, [](double r, double) { return r * r; });
  const HessianField hr = hessian(r2, g);
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j)
      CHECK(hr.xx(k, j) + hr.yy(k, j) == doctest::Approx(4.0).epsilon(5e-3));
}

TEST_CASE("stencil adjoints are exact") {
  const PolarGrid g(23, 16, 0.07);
  Eigen::ArrayXXd f = Eigen::ArrayXXd::Random(23, 16);
  Eigen::ArrayXXd w = Eigen::ArrayXXd::Random(23, 16);
  using Op = Eigen::ArrayXXd (*)(const PolarGrid&, const Eigen::ArrayXXd&);
  const Op ops[] = {stencil::d_s, stencil::d_ss, stencil::d_phi, stencil::d_phiphi};
  const Op adjs[] = {stencil::d_s_adj, stencil::d_ss_adj, stencil::d_phi_adj,
                     stencil::d_phiphi_adj};
  for (int i = 0; i < 4; ++i) {
    const double lhs = (ops[i](g, f) * w).sum();
    const double rhs = (f * adjs[i](g, w)).sum();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("resample") {
  const PolarGrid g(41, 48, 0.1);
  const ScalarField f = sample(g, [](double r, double phi) {
    return r * r * std::cos(2 * phi) + std::log(r);
  });
  // same-grid resampling is the identity on nodes
  const ScalarField same = resample(f, g, g);
  CHECK((same.a - f.a).abs().maxCoeff() < 1e-13);

  // bilinear in (log r, phi): error bounded by (dphi^2/8) sup|f_pp| +
  // (ds^2/8) sup|f_ss| = 0.0086 + 0.0017 on the source grid
  const PolarGrid g2(61, 80, 0.12);
  const ScalarField got = resample(f, g, g2);
  const ScalarField want = sample(g2, [](double r, double phi) {
    return r * r * std::cos(2 * phi) + std::log(r);
  });
  CHECK((got.a - want.a).abs().maxCoeff() < 1.1e-2);
}
