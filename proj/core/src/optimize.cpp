#include "disclin/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>

#include "disclin/errors.hpp"

namespace disclin {

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kGradientTol: return "gradient_tol";
    case Termination::kEnergyPlateau: return "energy_plateau";
    case Termination::kMaxIters: return "max_iters";
    case Termination::kLineSearchFailure: return "line_search_failure";
  }
  return "unknown";
}

namespace {

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Eigen::VectorXd lbfgs_direction(const std::deque<Pair>& mem, const Eigen::VectorXd& g) {
  Eigen::VectorXd q = -g;
  if (mem.empty()) return q;
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  const Pair& last = mem.back();
  q *= last.s.dot(last.y) / last.y.squaredNorm();
  for (std::size_t i = 0; i < mem.size(); ++i) {
    const double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return q;
}

}  // namespace

OptimizeReport minimize(const Oracle& oracle, Eigen::VectorXd& x, const OptimizerConfig& cfg,
                        const PostStep& post_step) {
  if (post_step) post_step(x);
  Eigen::VectorXd g(x.size());
  double fx = oracle(x, g);
  if (!std::isfinite(fx) || !g.allFinite())
    throw NumericalError("objective not finite at the starting point");

  OptimizeReport rep;
  rep.energy_history.push_back(fx);
  rep.grad_sup_norm = g.lpNorm<Eigen::Infinity>();

  std::deque<Pair> mem;
  Eigen::VectorXd x_new(x.size()), g_new(x.size());
  for (int it = 0; it < cfg.max_iters; ++it) {
    if (rep.grad_sup_norm <= cfg.grad_tol) {
      rep.termination = Termination::kGradientTol;
      break;
    }
    if (it >= cfg.plateau_window) {
      const double past =
          rep.energy_history[rep.energy_history.size() - 1 - cfg.plateau_window];
      if (past - fx <= cfg.energy_rel_tol * std::max(1.0, std::abs(fx))) {
        rep.termination = Termination::kEnergyPlateau;
        break;
      }
    }

    Eigen::VectorXd d = lbfgs_direction(mem, g);
    double slope = g.dot(d);
    if (!(slope < 0.0)) {  // fall back to steepest descent
      d = -g;
      slope = -g.squaredNorm();
      mem.clear();
    }

    double t = 1.0;
    bool accepted = false;
    double f_new = fx;
    for (int bt = 0; bt <= cfg.max_backtracks; ++bt) {
      x_new = x + t * d;
      if (post_step) post_step(x_new);
      f_new = oracle(x_new, g_new);
      if (std::isfinite(f_new) && g_new.allFinite() &&
          f_new <= fx + cfg.armijo_c1 * t * slope) {
        accepted = true;
        break;
      }
      t *= cfg.backtrack_factor;
    }
    if (!accepted) {
      rep.termination = Termination::kLineSearchFailure;
      break;
    }

    Pair p;
    p.s = x_new - x;
    p.y = g_new - g;
    const double sy = p.s.dot(p.y);
    if (sy > 1e-14 * p.s.norm() * p.y.norm()) {
      p.rho = 1.0 / sy;
      mem.push_back(std::move(p));
      if (static_cast<int>(mem.size()) > cfg.lbfgs_memory) mem.pop_front();
    }

    x.swap(x_new);
    g.swap(g_new);
    fx = f_new;
    rep.energy_history.push_back(fx);
    rep.grad_sup_norm = g.lpNorm<Eigen::Infinity>();
    rep.iterations = it + 1;
  }

  rep.final_value = fx;
  return rep;
}

OptimizeReport minimize_with_restarts(const Oracle& oracle, Eigen::VectorXd& x,
                                      const OptimizerConfig& cfg, const Perturber& perturber,
                                      const PostStep& post_step) {
  Eigen::VectorXd best_x = x;
  OptimizeReport best = minimize(oracle, best_x, cfg, post_step);
  best.restart_index = 0;
  for (int r = 1; r <= cfg.restarts; ++r) {
    Eigen::VectorXd xr = best_x + perturber(r, cfg.seed);
    OptimizeReport rep = minimize(oracle, xr, cfg, post_step);
    if (rep.final_value < best.final_value) {
      best = rep;
      best.restart_index = r;
      best_x.swap(xr);
    }
  }
  x = best_x;
  return best;
}

double gradient_check(const Oracle& oracle, const Eigen::VectorXd& x, int n_directions,
                      std::uint64_t seed) {
  if (n_directions < 1) throw UsageError("gradient check needs at least one direction");
  Eigen::VectorXd g(x.size());
  const double fx = oracle(x, g);
  if (!std::isfinite(fx) || !g.allFinite())
    throw NumericalError("objective not finite at the check point");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd gdump(x.size());
  const double steps[] = {1e-4, 1e-5, 1e-6};
  double worst = 0.0;
  for (int k = 0; k < n_directions; ++k) {
    Eigen::VectorXd d(x.size());
    for (Eigen::Index i = 0; i < d.size(); ++i) d(i) = normal(rng);
    d.normalize();
    const double exact = g.dot(d);
    double best = std::numeric_limits<double>::infinity();
    for (double eps : steps) {
      const double fp = oracle(x + eps * d, gdump);
      const double fm = oracle(x - eps * d, gdump);
      const double fd = (fp - fm) / (2.0 * eps);
      const double rel = std::abs(fd - exact) / std::max(1.0, std::abs(exact));
      best = std::min(best, rel);
    }
    worst = std::max(worst, best);
  }
  return worst;
}

}  // namespace disclin
