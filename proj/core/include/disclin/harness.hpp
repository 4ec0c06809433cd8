#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "disclin/curvature.hpp"
#include "disclin/optimize.hpp"
#include "disclin/params.hpp"
#include "disclin/solver.hpp"

namespace disclin {

struct DiagnosticsConfig {
  double window_lo_factor = 6.0;   // annulus starts at factor * h
  double window_hi_margin = 5.0;   // annulus ends at 1 - margin * h
  double isoper_slack = 0.05;
  double certificate_slack = 0.05;
};

// Full experiment description; JSON mirrors the nesting with snake_case keys
// (unknown keys are rejected). optimizer.grad_tol is the base value scaled by
// h^2 per sweep step; the top-level seed feeds the optimizer restarts.
struct ExperimentConfig {
  Model model = Model::kFvk;
  double delta = 0.5;
  std::vector<double> h_list = {0.05, 0.02, 0.01};
  GridPolicy grid;
  OptimizerConfig optimizer;
  DiagnosticsConfig diagnostics;
  std::string out_dir = "out";
  std::uint64_t seed = 1234;

  void validate() const;
  static ExperimentConfig from_json_text(const std::string& text);
  static ExperimentConfig from_json_file(const std::string& path);
  std::string to_json_text() const;
};

struct SweepRow {
  double h = 0.0;
  double delta = 0.0;
  Model model = Model::kFvk;
  int n_r = 0;
  int n_phi = 0;
  double e_total = 0.0;
  double e_membrane = 0.0;
  double e_bending = 0.0;
  double e_ansatz = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
  double kappa_l1_dev = 0.0;
  double certificate = 0.0;
  bool certificate_ok = false;
  bool failed = false;
  std::string error;
};

// Runs the experiment: warm-started minimization over h_list (descending),
// per-h diagnostics, and artifacts fields_<h>.csv, kappa_<h>.csv,
// report_<h>.json plus sweep.csv under cfg.out_dir. A failure at one h is
// captured in its row (NaN numerics) and report, and the sweep continues.
// fault_hook, when set, runs before each h (test instrumentation: throwing
// from it simulates a per-h failure).
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const std::function<void(double)>& fault_hook = {});

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double max_abs_residual = 0.0;
};

// Least squares of E/(2 pi Delta^2 h^2) against |log h| over non-failed rows;
// needs at least three distinct h.
ScalingFit fit_scaling(const std::vector<SweepRow>& rows);

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);

// Recomputes energies and diagnostics for stored fields and writes
// kappa_<h>.csv plus diagnose_<h>.json under out_dir.
void diagnose_file(const std::filesystem::path& fields_path,
                   const std::filesystem::path& out_dir);

}  // namespace disclin
