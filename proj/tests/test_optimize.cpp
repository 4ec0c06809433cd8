#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <cstring>

#include "disclin/energy.hpp"
#include "disclin/errors.hpp"
#include "disclin/optimize.hpp"
#include "disclin/solver.hpp"

using namespace disclin;

namespace {

constexpr double kPi = 3.14159265358979323846;

Oracle quadratic_bowl(const Eigen::VectorXd& a) {
  return [a](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x - a);
    return (x - a).squaredNorm();
  };
}

// Transcendental minima at x_i = log(2 + 0.7 i): quadratics converge to
// bitwise-exact minimizers (gradient exactly zero), this does not, so an
// unreachable grad_tol = 0 stays unreachable.
Oracle exp_bowl(int n) {
  return [n](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g.resize(n);
    double f = 0.0;
    for (int i = 0; i < n; ++i) {
      const double c = 2.0 + 0.7 * i;
      f += std::exp(x(i)) - c * x(i);
      g(i) = std::exp(x(i)) - c;
    }
    return f;
  };
}

}  // namespace

TEST_CASE("quadratic bowl converges fast") {
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(8, -1.0, 2.5);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(8);
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-10;
  cfg.restarts = 0;
  const OptimizeReport rep = minimize(quadratic_bowl(a), x, cfg);
  CHECK(rep.termination == Termination::kGradientTol);
  CHECK(rep.iterations <= 50);
  CHECK((x - a).norm() < 1e-9);
  CHECK(rep.final_value < 1e-18);
  // history is monotone
  for (std::size_t i = 1; i < rep.energy_history.size(); ++i)
    CHECK(rep.energy_history[i] <= rep.energy_history[i - 1] + 1e-15);
}

TEST_CASE("rosenbrock valley") {
  const Oracle rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1.0 - x(0), b = x(1) - x(0) * x(0);
    g.resize(2);
    g(0) = -2.0 * a - 400.0 * x(0) * b;
    g(1) = 200.0 * b;
    return a * a + 100.0 * b * b;
  };
  Eigen::VectorXd x(2);
  x << -1.2, 1.0;
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-8;
  cfg.max_iters = 1000;
  cfg.restarts = 0;
  const OptimizeReport rep = minimize(rosen, x, cfg);
  CHECK(rep.termination == Termination::kGradientTol);
  CHECK((x - Eigen::Vector2d(1.0, 1.0)).norm() < 1e-6);
}

TEST_CASE("termination reasons and strings") {
  CHECK(std::strcmp(to_string(Termination::kGradientTol), "gradient_tol") == 0);
  CHECK(std::strcmp(to_string(Termination::kEnergyPlateau), "energy_plateau") == 0);
  CHECK(std::strcmp(to_string(Termination::kMaxIters), "max_iters") == 0);
  CHECK(std::strcmp(to_string(Termination::kLineSearchFailure), "line_search_failure") == 0);

  OptimizerConfig cfg;
  cfg.restarts = 0;

  // plateau: gradient tolerance unreachable, energy settles at the machine
  // minimum and the window eventually sees no relative progress
  cfg.grad_tol = 0.0;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(4);
  CHECK(minimize(exp_bowl(4), x, cfg).termination == Termination::kEnergyPlateau);

  // max_iters: no exit test can fire within 7 genuine descent steps
  cfg.energy_rel_tol = 0.0;
  cfg.max_iters = 7;
  x.setZero();
  const OptimizeReport rep = minimize(exp_bowl(4), x, cfg);
  CHECK(rep.termination == Termination::kMaxIters);
  CHECK(rep.iterations == 7);

  // a lying gradient makes every search direction ascend; cap the
  // backtracking so t cannot shrink to a no-op step that Armijo accepts
  const Oracle liar = [](const Eigen::VectorXd& xv, Eigen::VectorXd& g) {
    g = -2.0 * xv;  // wrong sign
    return xv.squaredNorm();
  };
  Eigen::VectorXd y = Eigen::VectorXd::Constant(3, 1.0);
  OptimizerConfig lcfg;
  lcfg.restarts = 0;
  lcfg.max_backtracks = 8;
  CHECK(minimize(liar, y, lcfg).termination == Termination::kLineSearchFailure);
}

TEST_CASE("non-finite start is a numerical error") {
  OptimizerConfig cfg;
  cfg.restarts = 0;
  Eigen::VectorXd x = Eigen::VectorXd::Constant(2, std::nan(""));
  CHECK_THROWS_AS(minimize(quadratic_bowl(Eigen::VectorXd::Zero(2)), x, cfg),
                  NumericalError);
}

TEST_CASE("post step enforces the gauge") {
  const Oracle diff = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double d = x(0) - x(1) - 3.0;
    g.resize(2);
    g(0) = 2.0 * d;
    g(1) = -2.0 * d;
    return d * d;
  };
  const PostStep center = [](Eigen::VectorXd& x) { x.array() -= x.mean(); };
  Eigen::VectorXd x(2);
  x << 10.0, 7.0;
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.restarts = 0;
  const OptimizeReport rep = minimize(diff, x, cfg, center);
  CHECK(rep.final_value < 1e-18);
  CHECK(std::abs(x(0) + x(1)) < 1e-10);
  CHECK(x(0) == doctest::Approx(1.5).epsilon(1e-8));
}

TEST_CASE("restarts escape a shallow basin") {
  // f(x) = (x^2-1)^2 + 0.3 x: local minimum near +0.92, global near -1.07
  const Oracle well = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double t = x(0) * x(0) - 1.0;
    g.resize(1);
    g(0) = 4.0 * x(0) * t + 0.3;
    return t * t + 0.3 * x(0);
  };
  Eigen::VectorXd x(1);
  x << 0.9;
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-12;
  cfg.restarts = 3;
  const Perturber hop = [](int restart, std::uint64_t) {
    Eigen::VectorXd dx(1);
    dx << (restart % 2 == 0 ? -2.0 : 2.0);
    return dx;
  };
  const OptimizeReport rep = minimize_with_restarts(well, x, cfg, hop);
  CHECK(x(0) == doctest::Approx(-1.0365).epsilon(1e-3));
  CHECK(rep.restart_index > 0);

  // without restarts the local basin holds
  Eigen::VectorXd x0(1);
  x0 << 0.9;
  OptimizerConfig plain = cfg;
  plain.restarts = 0;
  minimize(well, x0, plain);
  CHECK(x0(0) > 0.0);
}

TEST_CASE("gradient check oracle sensitivity") {
  const Eigen::VectorXd a = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
  CHECK(gradient_check(quadratic_bowl(a), Eigen::VectorXd::Constant(6, 0.3), 4, 11) < 1e-10);

  const Oracle corrupted = [a](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    g = 2.0 * (x - a);
    g(2) = 0.0;
    return (x - a).squaredNorm();
  };
  CHECK(gradient_check(corrupted, Eigen::VectorXd::Constant(6, 0.3), 4, 11) > 1e-3);
}

TEST_CASE("smooth perturbation is deterministic and anchored") {
  const PolarGrid g(24, 32, 0.1);
  const Eigen::VectorXd p1 = smooth_perturbation(g, 2, 0.05, 42, 1);
  const Eigen::VectorXd p2 = smooth_perturbation(g, 2, 0.05, 42, 1);
  CHECK((p1 - p2).norm() == 0.0);
  const Eigen::VectorXd p3 = smooth_perturbation(g, 2, 0.05, 42, 2);
  CHECK((p1 - p3).norm() > 0.0);
  CHECK(p1.lpNorm<Eigen::Infinity>() == doctest::Approx(0.05).epsilon(1e-12));
  // vanishes on the first and last ring of each block (column-major layout:
  // ring index is the fast one)
  for (int f = 0; f < 2; ++f)
    for (int j = 0; j < g.n_phi(); ++j) {
      CHECK(std::abs(p1(f * g.size() + j * g.n_r() + 0)) < 1e-12);
      CHECK(std::abs(p1(f * g.size() + j * g.n_r() + (g.n_r() - 1))) < 1e-12);
    }
}

TEST_CASE("fvk descent from the ansatz") {
  Params p;
  p.h = 0.1;
  p.delta = 0.5;
  const PolarGrid g(32, 48, p.h);
  const FvkState start = sample_fvk_ansatz(p, g);
  const double e0 = fvk_energy(start.u, start.v, p, g).total;
  OptimizerConfig cfg;
  cfg.max_iters = 300;
  cfg.restarts = 0;
  cfg.grad_tol = 1e-10;
  const FvkResult res = minimize_fvk(p, g, cfg, start);
  CHECK(res.energy.total <= e0 * (1.0 + 1e-12));
  CHECK(res.energy.total < e0);
}

TEST_CASE("perturbed flat state buckles below the flat energy") {
  Params p;
  p.h = 0.1;
  p.delta = 0.5;
  const PolarGrid g(32, 48, p.h);
  VectorField2 u0 = make_vector2(g);
  ScalarField v0 = make_scalar(g);
  u0.x.setZero();
  u0.y.setZero();
  v0.a.setZero();
  const double flat = fvk_energy(u0, v0, p, g).total;
  CHECK(flat == doctest::Approx(kPi * 0.0625 * (1.0 - 0.01)).epsilon(0.01));

  Eigen::VectorXd x = smooth_perturbation(g, 3, 0.05, 7, 0);
  OptimizerConfig cfg;
  cfg.max_iters = 400;
  cfg.restarts = 0;
  FvkState s = unpack_fvk(x, g);
  const FvkResult res = minimize_fvk(p, g, cfg, s);
  CHECK(res.energy.total < flat);
}
