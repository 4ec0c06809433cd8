#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace disclin {

// Objective callback: returns the value and fills the gradient at x.
using Oracle = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

// Applied to each accepted iterate (gauge fixing such as mean subtraction).
using PostStep = std::function<void(Eigen::VectorXd&)>;

// Supplies the smooth perturbation added to the best iterate for restart i.
using Perturber = std::function<Eigen::VectorXd(int restart, std::uint64_t seed)>;

struct OptimizerConfig {
  int max_iters = 2000;
  double grad_tol = 1e-8;         // sup norm of the gradient
  double energy_rel_tol = 1e-9;  // relative decrease over plateau_window iters
  int plateau_window = 50;
  int lbfgs_memory = 10;
  double armijo_c1 = 1e-4;
  double backtrack_factor = 0.5;
  int max_backtracks = 60;
  int restarts = 1;
  double perturb_amplitude = 1e-2;  // relative to the field scale
  std::uint64_t seed = 1234;
};

enum class Termination { kGradientTol, kEnergyPlateau, kMaxIters, kLineSearchFailure };

const char* to_string(Termination t);

struct OptimizeReport {
  int iterations = 0;
  double final_value = 0.0;
  double grad_sup_norm = 0.0;
  std::vector<double> energy_history;  // accepted iterates, monotone
  Termination termination = Termination::kMaxIters;
  int restart_index = 0;  // which start produced the final iterate
};

// L-BFGS with Armijo backtracking. x holds the start and receives the result.
// Throws NumericalError when the objective or gradient is non-finite at the
// start; a non-finite trial point during line search is treated as a rejected
// step instead.
OptimizeReport minimize(const Oracle& oracle, Eigen::VectorXd& x, const OptimizerConfig& cfg,
                        const PostStep& post_step = {});

// Runs minimize from x, then from cfg.restarts perturbed copies of the best
// iterate so far, and keeps the lowest-energy result.
OptimizeReport minimize_with_restarts(const Oracle& oracle, Eigen::VectorXd& x,
                                      const OptimizerConfig& cfg, const Perturber& perturber,
                                      const PostStep& post_step = {});

// Directional finite-difference check: for n_directions random unit vectors d,
// compares g.d against central differences with steps 1e-4, 1e-5, 1e-6 and
// returns the max over directions of the best (min over steps) relative error.
double gradient_check(const Oracle& oracle, const Eigen::VectorXd& x, int n_directions,
                      std::uint64_t seed);

}  // namespace disclin
