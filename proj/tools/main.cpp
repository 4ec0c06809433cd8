#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "disclin/energy.hpp"
#include "disclin/errors.hpp"
#include "disclin/harness.hpp"
#include "disclin/io.hpp"
#include "disclin/radial.hpp"
#include "disclin/solver.hpp"
#include "disclin/version.hpp"

using namespace disclin;
using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

struct CommonOpts {
  double h = 0.05;
  double delta = 0.5;
  std::string model = "fvk";
  std::optional<int> n_r;
  std::optional<int> n_phi;
  std::uint64_t seed = 1234;
  std::string out;
};

void add_model_options(CLI::App* sub, CommonOpts& o, bool need_h = true) {
  sub->set_help_flag("--help", "Print help");  // frees -h / --h for the thickness
  auto* h = sub->add_option("--h", o.h, "Thickness h in (0, 1)");
  if (need_h) h->required();
  sub->add_option("--delta", o.delta, "Deficit parameter Delta in (0, 1)")->capture_default_str();
  sub->add_option("--model", o.model, "Energy model: fvk or plate")->capture_default_str();
  sub->add_option("--nr", o.n_r, "Radial nodes (default: 64 per decade, max 512)");
  sub->add_option("--nphi", o.n_phi, "Angular nodes");
  sub->add_option("--seed", o.seed, "Seed for restart perturbations")->capture_default_str();
}

Params make_params(const CommonOpts& o) {
  Params p;
  p.h = o.h;
  p.delta = o.delta;
  p.model = model_from_string(o.model);
  p.validate();
  return p;
}

PolarGrid make_grid(const CommonOpts& o) {
  GridPolicy policy;
  if (o.n_phi) policy.n_phi = *o.n_phi;
  if (o.n_r) return {*o.n_r, policy.n_phi, o.h};
  return policy.build(o.h);
}

void print(const json& j) { std::cout << j.dump(2) << "\n"; }

json energy_json(const EnergyBreakdown& e, const Params& p) {
  return {{"membrane", e.membrane},
          {"bending", e.bending},
          {"total", e.total},
          {"normalized_gap",
           e.total / (2.0 * kPi * p.delta * p.delta * p.h * p.h) - std::abs(std::log(p.h))}};
}

void run_eval_ansatz(const CommonOpts& o) {
  const Params p = make_params(o);
  const PolarGrid g = make_grid(o);
  EnergyBreakdown e;
  if (p.model == Model::kFvk) {
    const FvkState s = sample_fvk_ansatz(p, g);
    e = fvk_energy(s.u, s.v, p, g);
  } else {
    const Map3 y = sample_plate_ansatz(p, g);
    e = plate_energy(y, p, g);
  }
  json j;
  j["version"] = kFileStamp;
  j["model"] = to_string(p.model);
  j["h"] = p.h;
  j["delta"] = p.delta;
  j["grid"] = {{"n_r", g.n_r()}, {"n_phi", g.n_phi()}, {"r_min", g.r_min()}};
  j["energy"] = energy_json(e, p);
  print(j);
}

ExperimentConfig config_for(const CommonOpts& o) {
  ExperimentConfig cfg;
  cfg.model = model_from_string(o.model);
  cfg.delta = o.delta;
  cfg.h_list = {o.h};
  if (o.n_phi) cfg.grid.n_phi = *o.n_phi;
  if (o.n_r) {
    // Freeze the requested resolution independently of h.
    cfg.grid.nodes_per_decade = *o.n_r / std::log10(1.0 / o.h);
    cfg.grid.n_r_cap = *o.n_r;
  }
  cfg.optimizer.grad_tol = 1e-4;  // base, scaled by h^2 inside the sweep
  cfg.seed = o.seed;
  cfg.optimizer.seed = o.seed;
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

void run_minimize(const CommonOpts& o) {
  const ExperimentConfig cfg = config_for(o);
  const std::vector<SweepRow> rows = run_sweep(cfg);
  const SweepRow& row = rows.front();
  if (row.failed) throw NumericalError(row.error);
  json j;
  j["version"] = kFileStamp;
  j["model"] = to_string(row.model);
  j["h"] = row.h;
  j["delta"] = row.delta;
  j["grid"] = {{"n_r", row.n_r}, {"n_phi", row.n_phi}};
  j["energy"] = {{"membrane", row.e_membrane},
                 {"bending", row.e_bending},
                 {"total", row.e_total}};
  j["ansatz_energy"] = row.e_ansatz;
  j["iterations"] = row.iterations;
  j["grad_norm"] = row.grad_norm;
  j["out_dir"] = cfg.out_dir;
  print(j);
}

struct SweepOpts {
  std::string config;
  std::vector<double> h_list;
  std::string model;
  std::optional<double> delta;
  std::string out;
  std::optional<std::uint64_t> seed;
};

void run_sweep_cmd(const SweepOpts& o) {
  ExperimentConfig cfg;
  if (!o.config.empty()) cfg = ExperimentConfig::from_json_file(o.config);
  if (!o.model.empty()) cfg.model = model_from_string(o.model);
  if (o.delta) cfg.delta = *o.delta;
  if (!o.h_list.empty()) cfg.h_list = o.h_list;
  if (!o.out.empty()) cfg.out_dir = o.out;
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.optimizer.seed = *o.seed;
  }

  const std::vector<SweepRow> rows = run_sweep(cfg);
  json j;
  j["version"] = kFileStamp;
  j["out_dir"] = cfg.out_dir;
  json jr = json::array();
  std::size_t failed = 0;
  for (const SweepRow& r : rows) {
    json row = {{"h", r.h},        {"e_total", r.e_total}, {"e_ansatz", r.e_ansatz},
                {"iterations", r.iterations}, {"certificate_ok", r.certificate_ok}};
    if (r.failed) row["error"] = r.error;
    jr.push_back(row);
    if (r.failed) ++failed;
  }
  j["rows"] = jr;
  try {
    const ScalingFit fit = fit_scaling(rows);
    j["fit"] = {{"slope", fit.slope},
                {"intercept", fit.intercept},
                {"max_abs_residual", fit.max_abs_residual}};
  } catch (const UsageError&) {
    // fewer than three usable h values; no fit to report
  }
  print(j);
  if (failed == rows.size()) throw NumericalError("every h in the sweep failed");
}

void run_diagnose(const std::string& fields, const std::string& out) {
  diagnose_file(fields, out);
  json j;
  j["version"] = kFileStamp;
  j["fields"] = fields;
  j["out_dir"] = out;
  print(j);
}

void run_gradcheck(const CommonOpts& o, double tol, int dirs) {
  const Params p = make_params(o);
  const PolarGrid g = make_grid(o);
  Eigen::VectorXd x;
  Oracle oracle;
  if (p.model == Model::kFvk) {
    x = pack(sample_fvk_ansatz(p, g));
    oracle = fvk_oracle(p, g);
  } else {
    x = pack(sample_plate_ansatz(p, g));
    oracle = plate_oracle(p, g);
  }
  const double amp = 0.05 * std::max(x.lpNorm<Eigen::Infinity>(), 1e-3);
  x += smooth_perturbation(g, 3, amp, o.seed, 1);
  const double err = gradient_check(oracle, x, dirs, o.seed);
  json j;
  j["version"] = kFileStamp;
  j["model"] = to_string(p.model);
  j["h"] = p.h;
  j["delta"] = p.delta;
  j["directions"] = dirs;
  j["max_rel_err"] = err;
  j["tol"] = tol;
  j["pass"] = err <= tol;
  print(j);
  if (err > tol) throw NumericalError("gradient check exceeded tolerance");
}

void run_radial(const CommonOpts& o) {
  CommonOpts local = o;
  local.model = "fvk";
  const Params p = make_params(local);
  const PolarGrid g = make_grid(local);
  // 1D iterations are cheap; run with the converged-oracle budget
  OptimizerConfig oc;
  oc.grad_tol = 1e-4 * p.h * p.h;
  oc.max_iters = 30000;
  oc.plateau_window = 200;
  oc.energy_rel_tol = 1e-13;
  oc.restarts = 2;
  oc.seed = o.seed;
  const RadialResult res = radial_minimize(p, g, oc);

  // Lift to the 2D grid and re-evaluate as a consistency check.
  const FvkState lifted = lift_to_2d(res.fields, g, g);
  const EnergyBreakdown e2d = fvk_energy(lifted.u, lifted.v, p, g);

  json j;
  j["version"] = kFileStamp;
  j["h"] = p.h;
  j["delta"] = p.delta;
  j["grid"] = {{"n_r", g.n_r()}, {"n_phi", g.n_phi()}, {"r_min", g.r_min()}};
  j["energy"] = energy_json(res.energy, p);
  j["energy_2d_lift"] = energy_json(e2d, p);
  j["lift_rel_gap"] = std::abs(e2d.total - res.energy.total) / res.energy.total;
  j["iterations"] = res.report.iterations;
  j["termination"] = to_string(res.report.termination);
  print(j);

  if (!o.out.empty()) {
    std::filesystem::create_directories(o.out);
    std::string text;
    text += "# ";
    text += kFileStamp;
    text += " radial\n# h=" + format_g(p.h) + " delta=" + format_g(p.delta) + "\n";
    text += "r,u,v\n";
    for (int k = 0; k < g.n_r(); ++k)
      text += format_g(g.r(k)) + "," + format_g(res.fields.u(k)) + "," +
              format_g(res.fields.v(k)) + "\n";
    atomic_write_text(std::filesystem::path(o.out) / ("radial_" + h_tag(p.h) + ".csv"),
                      text);
  }
}

void run_kl3d(const CommonOpts& o, int n_gauss) {
  CommonOpts local = o;
  local.model = "plate";
  const Params p = make_params(local);
  const PolarGrid g = make_grid(local);
  const double e = kl3d_energy(p, g, n_gauss);
  const double gamma = p.gamma();
  const double logh = std::abs(std::log(p.h));
  const double cone = kPi * p.delta * p.delta * p.h * p.h * logh / (6.0 * gamma);
  json j;
  j["version"] = kFileStamp;
  j["h"] = p.h;
  j["delta"] = p.delta;
  j["n_gauss"] = n_gauss;
  j["energy"] = e;
  j["normalized"] = e / (p.h * p.h * logh);
  j["cone_closed_form"] = cone;
  j["ratio_to_cone"] = e / cone;
  print(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Elastic energy laboratory for a single disclination in a thin sheet"};
  app.set_help_flag("--help", "Print help");
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CommonOpts eval_o;
  add_model_options(app.add_subcommand("eval-ansatz", "Evaluate the cut-off cone ansatz"),
                    eval_o);

  CommonOpts min_o;
  min_o.out = "out";
  auto* min_sub =
      app.add_subcommand("minimize", "Minimize the energy at one h and write artifacts");
  add_model_options(min_sub, min_o);
  min_sub->add_option("--out", min_o.out, "Output directory")->capture_default_str();

  SweepOpts sweep_o;
  auto* sweep_sub = app.add_subcommand("sweep", "Continuation sweep over a list of h");
  sweep_sub->set_help_flag("--help", "Print help");
  sweep_sub->add_option("--config", sweep_o.config, "Experiment config JSON");
  sweep_sub->add_option("--h", sweep_o.h_list, "Thickness values (repeatable)");
  sweep_sub->add_option("--model", sweep_o.model, "Energy model: fvk or plate");
  sweep_sub->add_option("--delta", sweep_o.delta, "Deficit parameter");
  sweep_sub->add_option("--out", sweep_o.out, "Output directory");
  sweep_sub->add_option("--seed", sweep_o.seed, "Seed for restart perturbations");

  std::string diag_fields, diag_out = "out";
  auto* diag_sub = app.add_subcommand("diagnose", "Diagnostics for stored fields");
  diag_sub->set_help_flag("--help", "Print help");
  diag_sub->add_option("--fields", diag_fields, "fields_<h>.csv to analyze")->required();
  diag_sub->add_option("--out", diag_out, "Output directory")->capture_default_str();

  CommonOpts gc_o;
  double gc_tol = 1e-6;
  int gc_dirs = 5;
  auto* gc_sub = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  add_model_options(gc_sub, gc_o);
  gc_sub->add_option("--tol", gc_tol, "Max relative error accepted")->capture_default_str();
  gc_sub->add_option("--dirs", gc_dirs, "Number of random directions")->capture_default_str();

  CommonOpts rad_o;
  auto* rad_sub = app.add_subcommand("radial", "Radially symmetric FvK minimization");
  add_model_options(rad_sub, rad_o);
  rad_sub->add_option("--out", rad_o.out, "Optional output directory for the profile");

  CommonOpts kl_o;
  int kl_gauss = 4;
  auto* kl_sub =
      app.add_subcommand("kl3d", "3D energy of the Kirchhoff-Love extension of the ansatz");
  add_model_options(kl_sub, kl_o);
  kl_sub->add_option("--ngauss", kl_gauss, "Gauss points across the thickness")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (app.got_subcommand("eval-ansatz")) run_eval_ansatz(eval_o);
    if (app.got_subcommand("minimize")) run_minimize(min_o);
    if (app.got_subcommand("sweep")) run_sweep_cmd(sweep_o);
    if (app.got_subcommand("diagnose")) run_diagnose(diag_fields, diag_out);
    if (app.got_subcommand("gradcheck")) run_gradcheck(gc_o, gc_tol, gc_dirs);
    if (app.got_subcommand("radial")) run_radial(rad_o);
    if (app.got_subcommand("kl3d")) run_kl3d(kl_o, kl_gauss);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
