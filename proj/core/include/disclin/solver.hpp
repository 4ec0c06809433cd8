#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "disclin/energy.hpp"
#include "disclin/grid.hpp"
#include "disclin/optimize.hpp"
#include "disclin/params.hpp"

namespace disclin {

// Discretization policy tied to the core size: r_min = r_min_factor * h and
// n_r = ceil(nodes_per_decade * log10(1/r_min)), clamped to [8, n_r_cap].
struct GridPolicy {
  int n_phi = 256;
  double nodes_per_decade = 64.0;
  int n_r_cap = 512;
  double r_min_factor = 1.0;

  int n_r_for(double h) const;
  PolarGrid build(double h) const;
};

struct FvkState {
  VectorField2 u;
  ScalarField v;
};

FvkState sample_fvk_ansatz(const Params& p, const PolarGrid& g);
Map3 sample_plate_ansatz(const Params& p, const PolarGrid& g);

// Flat layout: one column-major block per field, in declaration order.
Eigen::VectorXd pack(const FvkState& s);
Eigen::VectorXd pack(const Map3& y);
FvkState unpack_fvk(const Eigen::VectorXd& x, const PolarGrid& g);
Map3 unpack_map3(const Eigen::VectorXd& x, const PolarGrid& g);

Oracle fvk_oracle(const Params& p, const PolarGrid& g);
Oracle plate_oracle(const Params& p, const PolarGrid& g);

// Subtracts the mean of each of n_fields equal blocks (shift gauge fixing;
// the energies depend on derivatives only, so this is hygiene, not physics).
PostStep mean_free_post_step(int n_fields);

// Deterministic smooth perturbation: low angular modes times radial bumps
// vanishing at both grid ends, one block per field, sup norm ~ amplitude.
Eigen::VectorXd smooth_perturbation(const PolarGrid& g, int n_fields, double amplitude,
                                    std::uint64_t seed, int restart);

FvkState resample_fields(const FvkState& s, const PolarGrid& from, const PolarGrid& to);
Map3 resample_fields(const Map3& y, const PolarGrid& from, const PolarGrid& to);

// Start selection for one h: the sampled ansatz, the previous minimizer
// resampled onto g (when given), and for FvK the lifted minimizer of the 1D
// radial reduction, evaluated and ranked; picking the best keeps monotone
// descent below the ansatz energy while skipping most of the 2D descent.
struct FvkStart {
  FvkState state;
  double e_ansatz = 0.0;
  double e_start = 0.0;
  const char* source = "ansatz";  // "ansatz" | "previous" | "radial"
};

FvkStart fvk_start_fields(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                          const FvkState* prev, const PolarGrid* prev_grid);

struct PlateStart {
  Map3 y;
  double e_ansatz = 0.0;
  double e_start = 0.0;
  const char* source = "ansatz";
};

PlateStart plate_start_fields(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                              const Map3* prev, const PolarGrid* prev_grid);

struct FvkResult {
  FvkState state;
  EnergyBreakdown energy;
  OptimizeReport report;
};

struct PlateResult {
  Map3 y;
  EnergyBreakdown energy;
  OptimizeReport report;
};

// Restarted L-BFGS from the given start; cfg.grad_tol is used as written.
FvkResult minimize_fvk(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                       const FvkState& start);
PlateResult minimize_plate(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                           const Map3& start);

struct ContinuationStep {
  double h;
  PolarGrid grid;
  double e_ansatz;
  EnergyBreakdown energy;
  OptimizeReport report;
  FvkState fvk;  // populated for Model::kFvk
  Map3 plate;    // populated for Model::kPlate
};

// Minimizes at each h, warm-starting from the better of the ansatz and the
// previous minimizer resampled (h processed in decreasing order; results are
// returned in the input order). The start is never above the ansatz energy,
// so monotone descent guarantees E_min <= E_ansatz per step.
// cfg.grad_tol is treated as a base value and scaled by h^2 per step.
std::vector<ContinuationStep> continuation(Model model, double delta,
                                           const std::vector<double>& h_list,
                                           const GridPolicy& policy,
                                           const OptimizerConfig& cfg);

}  // namespace disclin
