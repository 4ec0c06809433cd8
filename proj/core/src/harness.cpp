#include "disclin/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>
#include <type_traits>

#include "json.hpp"

#include "disclin/energy.hpp"
#include "disclin/errors.hpp"
#include "disclin/io.hpp"
#include "disclin/version.hpp"

namespace disclin {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  return seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

void require_keys(const json& j, std::initializer_list<const char*> allowed,
                  const char* where) {
  if (!j.is_object()) throw UsageError(std::string("config section '") + where +
                                       "' must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok)
      throw UsageError(std::string("unknown config key '") + it.key() + "' in " + where);
  }
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

// Everything diagnosable about one minimized (or stored) state.
struct DiagnosticsResult {
  bool valid = false;  // window [a, b] holds at least one dyadic octave
  double a = 0.0;
  double b = 0.0;
  double kappa_l1_dev = kNaN;
  double certificate = kNaN;
  double bending_annulus = kNaN;
  bool certificate_ok = false;
  CurvatureProfile profile;
  std::vector<IsoperRecord> isoper;
  std::optional<int> degree;
  std::string degree_error;
  std::optional<InterpolationRecord> interpolation;
};

template <typename StateT>
DiagnosticsResult run_diagnostics(const StateT& state, const Params& p, const PolarGrid& g,
                                  const DiagnosticsConfig& cfg) {
  constexpr bool is_fvk = std::is_same_v<StateT, FvkState>;
  DiagnosticsResult d;
  d.a = std::max(cfg.window_lo_factor * p.h, g.r(0));
  d.b = 1.0 - cfg.window_hi_margin * p.h;
  if (!(d.a > 0.0) || d.b < 2.0 * d.a * (1.0 - 1e-12)) return d;
  d.valid = true;

  const std::vector<double> radii = dyadic_radii(d.a, d.b);
  ScalarField bend_density;
  if constexpr (is_fvk) {
    d.profile = kappa_fvk(state.v, g, p.delta, radii);
    bend_density = bending_density_fvk(state.v, g);
  } else {
    d.profile = kappa_plate(state, g, p.delta, radii);
    bend_density = bending_density_plate(state, g);
  }
  d.kappa_l1_dev = l1_deviation(d.profile, d.a, d.b);
  d.certificate = lower_bound_certificate(d.profile, d.a, d.b);
  d.bending_annulus = integrate_annulus(bend_density, g, d.a, d.b);
  // The scalar route bounds int |D^2 v|^2; for maps the bound holds against
  // three times the full Hessian content.
  const double factor = is_fvk ? 1.0 : 3.0;
  d.certificate_ok =
      d.certificate <= (1.0 + cfg.certificate_slack) * factor * d.bending_annulus;

  for (double r : radii) {
    if constexpr (is_fvk)
      d.isoper.push_back(isoper_check(state.v, g, r, cfg.isoper_slack));
    else
      d.isoper.push_back(isoper_check(state, g, r, cfg.isoper_slack));
  }

  const int mid_ring = g.nearest_ring(std::sqrt(d.a * d.b));
  try {
    if constexpr (is_fvk) {
      d.degree = brouwer_degree(ring_loop(gradient(state.v, g), g, mid_ring),
                                Eigen::Vector2d::Zero());
    } else {
      VectorField2 inplane;
      inplane.x = state.c[0];
      inplane.y = state.c[1];
      d.degree = brouwer_degree(ring_loop(inplane, g, mid_ring), Eigen::Vector2d::Zero());
    }
  } catch (const NumericalError& e) {
    d.degree_error = e.what();
  }

  if constexpr (is_fvk) {
    try {
      d.interpolation = interpolation_diagnostic(state.u, state.v, p, g, d.b);
    } catch (const UsageError&) {
      // window too small for the identity diagnostic; skip it
    }
  }
  return d;
}

json diagnostics_json(const DiagnosticsResult& d) {
  json out;
  out["window"] = {d.a, d.b};
  out["valid"] = d.valid;
  out["kappa_l1_dev"] = d.kappa_l1_dev;
  out["certificate"] = d.certificate;
  out["bending_annulus"] = d.bending_annulus;
  out["certificate_ok"] = d.certificate_ok;
  json iso = json::array();
  for (const IsoperRecord& r : d.isoper)
    iso.push_back({{"r", r.radius}, {"lhs", r.lhs}, {"rhs", r.rhs}, {"ok", r.satisfied}});
  out["isoper"] = iso;
  if (d.degree)
    out["degree"] = *d.degree;
  else if (!d.degree_error.empty())
    out["degree_error"] = d.degree_error;
  if (d.interpolation) {
    const InterpolationRecord& ir = *d.interpolation;
    out["interpolation"] = {{"r_lo", ir.r_lo},
                            {"r_hi", ir.r_hi},
                            {"identity_residual", ir.identity_residual},
                            {"l1_F", ir.l1_F},
                            {"l1_Fp", ir.l1_Fp},
                            {"l1_Fpp", ir.l1_Fpp},
                            {"realized_c", ir.realized_c}};
  }
  return out;
}

double normalized_gap(double e_total, double h, double delta) {
  return e_total / (2.0 * kPi * delta * delta * h * h) - std::abs(std::log(h));
}

json report_json(const Params& p, const PolarGrid& g, double e_ansatz,
                 const EnergyBreakdown& e, const OptimizeReport& rep,
                 const DiagnosticsResult& d) {
  json out;
  out["version"] = kFileStamp;
  out["model"] = to_string(p.model);
  out["h"] = p.h;
  out["delta"] = p.delta;
  out["grid"] = {{"n_r", g.n_r()}, {"n_phi", g.n_phi()}, {"r_min", g.r_min()}};
  out["ansatz_energy"] = e_ansatz;
  out["energy"] = {{"membrane", e.membrane}, {"bending", e.bending}, {"total", e.total}};
  out["normalized_gap"] = normalized_gap(e.total, p.h, p.delta);
  out["optimizer"] = {{"iterations", rep.iterations},
                      {"final_value", rep.final_value},
                      {"grad_sup_norm", rep.grad_sup_norm},
                      {"termination", to_string(rep.termination)},
                      {"restart_index", rep.restart_index}};
  out["diagnostics"] = diagnostics_json(d);
  return out;
}

void write_json(const std::filesystem::path& path, const json& j) {
  atomic_write_text(path, j.dump(2) + "\n");
}

}  // namespace

void ExperimentConfig::validate() const {
  Params p;
  p.delta = delta;
  p.model = model;
  if (h_list.empty()) throw UsageError("h_list must not be empty");
  for (double h : h_list) {
    p.h = h;
    p.validate();
  }
  if (grid.n_phi < 8) throw UsageError("grid.n_phi must be at least 8");
  if (!(grid.nodes_per_decade > 0.0)) throw UsageError("grid.nodes_per_decade must be positive");
  if (grid.n_r_cap < 8) throw UsageError("grid.n_r_cap must be at least 8");
  if (!(grid.r_min_factor > 0.0)) throw UsageError("grid.r_min_factor must be positive");
  if (optimizer.max_iters < 0) throw UsageError("optimizer.max_iters must be nonnegative");
  if (optimizer.max_backtracks < 1) throw UsageError("optimizer.max_backtracks must be positive");
  if (optimizer.plateau_window < 1) throw UsageError("optimizer.plateau_window must be positive");
  if (optimizer.lbfgs_memory < 1) throw UsageError("optimizer.lbfgs_memory must be positive");
  if (optimizer.restarts < 0) throw UsageError("optimizer.restarts must be nonnegative");
  if (!(diagnostics.window_lo_factor > 0.0))
    throw UsageError("diagnostics.window_lo_factor must be positive");
  if (!(diagnostics.window_hi_margin >= 0.0))
    throw UsageError("diagnostics.window_hi_margin must be nonnegative");
  if (out_dir.empty()) throw UsageError("out_dir must not be empty");
}

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    require_keys(j, {"model", "delta", "h_list", "grid", "optimizer", "diagnostics",
                     "out_dir", "seed"},
                 "config");
    if (j.contains("model")) cfg.model = model_from_string(j.at("model").get<std::string>());
    maybe(j, "delta", cfg.delta);
    maybe(j, "h_list", cfg.h_list);
    maybe(j, "out_dir", cfg.out_dir);
    maybe(j, "seed", cfg.seed);
    if (j.contains("grid")) {
      const json& jg = j.at("grid");
      require_keys(jg, {"n_phi", "nodes_per_decade", "n_r_cap", "r_min_factor"}, "grid");
      maybe(jg, "n_phi", cfg.grid.n_phi);
      maybe(jg, "nodes_per_decade", cfg.grid.nodes_per_decade);
      maybe(jg, "n_r_cap", cfg.grid.n_r_cap);
      maybe(jg, "r_min_factor", cfg.grid.r_min_factor);
    }
    if (j.contains("optimizer")) {
      const json& jo = j.at("optimizer");
      require_keys(jo,
                   {"max_iters", "grad_tol", "energy_rel_tol", "plateau_window",
                    "lbfgs_memory", "armijo_c1", "backtrack_factor", "max_backtracks",
                    "restarts", "perturb_amplitude"},
                   "optimizer");
      maybe(jo, "max_iters", cfg.optimizer.max_iters);
      maybe(jo, "grad_tol", cfg.optimizer.grad_tol);
      maybe(jo, "energy_rel_tol", cfg.optimizer.energy_rel_tol);
      maybe(jo, "plateau_window", cfg.optimizer.plateau_window);
      maybe(jo, "lbfgs_memory", cfg.optimizer.lbfgs_memory);
      maybe(jo, "armijo_c1", cfg.optimizer.armijo_c1);
      maybe(jo, "backtrack_factor", cfg.optimizer.backtrack_factor);
      maybe(jo, "max_backtracks", cfg.optimizer.max_backtracks);
      maybe(jo, "restarts", cfg.optimizer.restarts);
      maybe(jo, "perturb_amplitude", cfg.optimizer.perturb_amplitude);
    }
    if (j.contains("diagnostics")) {
      const json& jd = j.at("diagnostics");
      require_keys(jd,
                   {"window_lo_factor", "window_hi_margin", "isoper_slack",
                    "certificate_slack"},
                   "diagnostics");
      maybe(jd, "window_lo_factor", cfg.diagnostics.window_lo_factor);
      maybe(jd, "window_hi_margin", cfg.diagnostics.window_hi_margin);
      maybe(jd, "isoper_slack", cfg.diagnostics.isoper_slack);
      maybe(jd, "certificate_slack", cfg.diagnostics.certificate_slack);
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("config JSON error: ") + e.what());
  }
  cfg.optimizer.seed = cfg.seed;
  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["model"] = to_string(model);
  j["delta"] = delta;
  j["h_list"] = h_list;
  j["grid"] = {{"n_phi", grid.n_phi},
               {"nodes_per_decade", grid.nodes_per_decade},
               {"n_r_cap", grid.n_r_cap},
               {"r_min_factor", grid.r_min_factor}};
  j["optimizer"] = {{"max_iters", optimizer.max_iters},
                    {"grad_tol", optimizer.grad_tol},
                    {"energy_rel_tol", optimizer.energy_rel_tol},
                    {"plateau_window", optimizer.plateau_window},
                    {"lbfgs_memory", optimizer.lbfgs_memory},
                    {"armijo_c1", optimizer.armijo_c1},
                    {"backtrack_factor", optimizer.backtrack_factor},
                    {"max_backtracks", optimizer.max_backtracks},
                    {"restarts", optimizer.restarts},
                    {"perturb_amplitude", optimizer.perturb_amplitude}};
  j["diagnostics"] = {{"window_lo_factor", diagnostics.window_lo_factor},
                      {"window_hi_margin", diagnostics.window_hi_margin},
                      {"isoper_slack", diagnostics.isoper_slack},
                      {"certificate_slack", diagnostics.certificate_slack}};
  j["out_dir"] = out_dir;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg,
                                const std::function<void(double)>& fault_hook) {
  cfg.validate();
  const std::filesystem::path out_dir(cfg.out_dir);
  std::filesystem::create_directories(out_dir);
  atomic_write_text(out_dir / "config.json", cfg.to_json_text());

  std::vector<std::size_t> order(cfg.h_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cfg.h_list[a] > cfg.h_list[b]; });

  std::vector<SweepRow> rows(cfg.h_list.size());
  FvkState prev_fvk;
  Map3 prev_plate;
  std::optional<PolarGrid> prev_grid;

  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const double h = cfg.h_list[order[rank]];
    SweepRow& row = rows[order[rank]];
    row.h = h;
    row.delta = cfg.delta;
    row.model = cfg.model;
    const std::string tag = h_tag(h);
    Params p;
    p.h = h;
    p.delta = cfg.delta;
    p.model = cfg.model;

    try {
      if (fault_hook) fault_hook(h);
      const PolarGrid g = cfg.grid.build(h);
      row.n_r = g.n_r();
      row.n_phi = g.n_phi();

      OptimizerConfig oc = cfg.optimizer;
      oc.grad_tol = cfg.optimizer.grad_tol * h * h;
      oc.seed = mix(cfg.seed, rank);

      DiagnosticsResult diag;
      EnergyBreakdown e;
      OptimizeReport rep;
      if (cfg.model == Model::kFvk) {
        const FvkStart start =
            fvk_start_fields(p, g, oc, prev_grid ? &prev_fvk : nullptr,
                             prev_grid ? &*prev_grid : nullptr);
        row.e_ansatz = start.e_ansatz;
        FvkResult res = minimize_fvk(p, g, oc, start.state);
        e = res.energy;
        rep = res.report;
        diag = run_diagnostics(res.state, p, g, cfg.diagnostics);
        write_fields_csv(out_dir / ("fields_" + tag + ".csv"), p, g, res.state);
        prev_fvk = std::move(res.state);
      } else {
        const PlateStart start =
            plate_start_fields(p, g, oc, prev_grid ? &prev_plate : nullptr,
                               prev_grid ? &*prev_grid : nullptr);
        row.e_ansatz = start.e_ansatz;
        PlateResult res = minimize_plate(p, g, oc, start.y);
        e = res.energy;
        rep = res.report;
        diag = run_diagnostics(res.y, p, g, cfg.diagnostics);
        write_fields_csv(out_dir / ("fields_" + tag + ".csv"), p, g, res.y);
        prev_plate = std::move(res.y);
      }
      prev_grid = g;

      row.e_total = e.total;
      row.e_membrane = e.membrane;
      row.e_bending = e.bending;
      row.iterations = rep.iterations;
      row.grad_norm = rep.grad_sup_norm;
      row.kappa_l1_dev = diag.kappa_l1_dev;
      row.certificate = diag.certificate;
      row.certificate_ok = diag.certificate_ok;

      if (diag.valid) write_kappa_csv(out_dir / ("kappa_" + tag + ".csv"), p, diag.profile);
      write_json(out_dir / ("report_" + tag + ".json"),
                 report_json(p, g, row.e_ansatz, e, rep, diag));
    } catch (const std::exception& ex) {
      row.failed = true;
      row.error = ex.what();
      row.e_total = row.e_membrane = row.e_bending = kNaN;
      row.e_ansatz = kNaN;
      row.grad_norm = row.kappa_l1_dev = row.certificate = kNaN;
      json j;
      j["version"] = kFileStamp;
      j["model"] = to_string(p.model);
      j["h"] = h;
      j["delta"] = cfg.delta;
      j["error"] = row.error;
      write_json(out_dir / ("report_" + tag + ".json"), j);
    }
  }

  write_sweep_csv(out_dir / "sweep.csv", rows);
  return rows;
}

ScalingFit fit_scaling(const std::vector<SweepRow>& rows) {
  std::vector<double> xs, ys;
  for (const SweepRow& r : rows) {
    if (r.failed || !std::isfinite(r.e_total)) continue;
    xs.push_back(std::abs(std::log(r.h)));
    ys.push_back(r.e_total / (2.0 * kPi * r.delta * r.delta * r.h * r.h));
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3)
    throw UsageError("scaling fit needs at least three distinct h values");

  const double n = static_cast<double>(xs.size());
  const double sx = std::accumulate(xs.begin(), xs.end(), 0.0);
  const double sy = std::accumulate(ys.begin(), ys.end(), 0.0);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  ScalingFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.max_abs_residual =
        std::max(fit.max_abs_residual, std::abs(ys[i] - fit.slope * xs[i] - fit.intercept));
  return fit;
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::string text;
  text += "# ";
  text += kFileStamp;
  text += " sweep\n";
  text +=
      "h,delta,model,n_r,n_phi,e_total,e_membrane,e_bending,e_ansatz,iterations,"
      "grad_norm,kappa_l1_dev,certificate,certificate_ok\n";
  for (const SweepRow& r : rows) {
    text += format_g(r.h);
    text += ',';
    text += format_g(r.delta);
    text += ',';
    text += to_string(r.model);
    text += ',';
    text += std::to_string(r.n_r);
    text += ',';
    text += std::to_string(r.n_phi);
    for (double v : {r.e_total, r.e_membrane, r.e_bending, r.e_ansatz}) {
      text += ',';
      text += format_g(v);
    }
    text += ',';
    text += std::to_string(r.iterations);
    for (double v : {r.grad_norm, r.kappa_l1_dev, r.certificate}) {
      text += ',';
      text += format_g(v);
    }
    text += ',';
    text += r.certificate_ok ? '1' : '0';
    text += '\n';
  }
  atomic_write_text(path, text);
}

void diagnose_file(const std::filesystem::path& fields_path,
                   const std::filesystem::path& out_dir) {
  const FieldsFile f = read_fields_csv(fields_path);
  const PolarGrid g = f.grid();
  const DiagnosticsConfig dc;
  std::filesystem::create_directories(out_dir);
  const std::string tag = h_tag(f.params.h);

  json j;
  j["version"] = kFileStamp;
  j["model"] = to_string(f.params.model);
  j["h"] = f.params.h;
  j["delta"] = f.params.delta;
  j["grid"] = {{"n_r", g.n_r()}, {"n_phi", g.n_phi()}, {"r_min", g.r_min()}};

  EnergyBreakdown e;
  DiagnosticsResult diag;
  if (f.params.model == Model::kFvk) {
    e = fvk_energy(f.fvk.u, f.fvk.v, f.params, g);
    diag = run_diagnostics(f.fvk, f.params, g, dc);
  } else {
    e = plate_energy(f.plate, f.params, g);
    diag = run_diagnostics(f.plate, f.params, g, dc);
  }
  j["energy"] = {{"membrane", e.membrane}, {"bending", e.bending}, {"total", e.total}};
  j["normalized_gap"] = normalized_gap(e.total, f.params.h, f.params.delta);
  j["diagnostics"] = diagnostics_json(diag);

  if (diag.valid)
    write_kappa_csv(out_dir / ("kappa_" + tag + ".csv"), f.params, diag.profile);
  write_json(out_dir / ("diagnose_" + tag + ".json"), j);
}

}  // namespace disclin
