#include "disclin/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "disclin/errors.hpp"
#include "disclin/geometry.hpp"
#include "disclin/radial.hpp"
#include "disclin/stencil.hpp"

namespace disclin {

namespace {

constexpr double kPi = 3.14159265358979323846;

Eigen::Map<const Eigen::VectorXd> flat(const Eigen::ArrayXXd& a) {
  return {a.data(), a.size()};
}

void put(Eigen::VectorXd& x, Eigen::Index& at, const Eigen::ArrayXXd& a) {
  x.segment(at, a.size()) = flat(a);
  at += a.size();
}

Eigen::ArrayXXd take(const Eigen::VectorXd& x, Eigen::Index& at, const PolarGrid& g) {
  Eigen::ArrayXXd a(g.n_r(), g.n_phi());
  Eigen::Map<Eigen::VectorXd>(a.data(), a.size()) = x.segment(at, a.size());
  at += a.size();
  return a;
}

std::uint64_t mix(std::uint64_t seed, std::uint64_t salt) {
  return seed ^ (salt + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

// Rotationally symmetric plate maps y = (rho(r) cos, rho(r) sin, z(r)) reduce
// the plate energy to
//   2 pi int r [ (rho'^2 + z'^2 - 1)^2 + (rho^2/r^2 - gamma^2)^2 ] dr
//   + 2 pi h^2 int r [ rho''^2 + 3((rho' - rho/r)/r)^2 + z''^2 + (z'/r)^2 ] dr.
// Used only to warm-start the 2D plate solve; the public radial module stays
// the FvK reduction.
struct PlateProfile {
  Eigen::ArrayXd rho;
  Eigen::ArrayXd z;
};

Eigen::ArrayXXd col_mat(const Eigen::ArrayXd& c) {
  Eigen::ArrayXXd m(c.size(), 1);
  m.col(0) = c;
  return m;
}

EnergyBreakdown plate_profile_energy(const PlateProfile& f, const Params& p, const PolarGrid& g,
                                     PlateProfile* grad) {
  const Eigen::ArrayXd& r = g.radii();
  const Eigen::ArrayXd w = 2.0 * kPi * g.rweights() * r;
  const double h2 = p.h * p.h;
  const double gamma2 = 1.0 - p.delta * p.delta;

  const Eigen::ArrayXd rp = stencil::d_s(g, col_mat(f.rho)).col(0) / r;
  const Eigen::ArrayXd rpp =
      (stencil::d_ss(g, col_mat(f.rho)).col(0) - stencil::d_s(g, col_mat(f.rho)).col(0)) /
      r.square();
  const Eigen::ArrayXd zp = stencil::d_s(g, col_mat(f.z)).col(0) / r;
  const Eigen::ArrayXd zpp =
      (stencil::d_ss(g, col_mat(f.z)).col(0) - stencil::d_s(g, col_mat(f.z)).col(0)) /
      r.square();

  const Eigen::ArrayXd urr = rp.square() + zp.square() - 1.0;
  const Eigen::ArrayXd upp = f.rho.square() / r.square() - gamma2;
  const Eigen::ArrayXd aa = rp / r - f.rho / r.square();

  EnergyBreakdown e;
  e.membrane = (w * (urr.square() + upp.square())).sum();
  e.bending =
      h2 * (w * (rpp.square() + 3.0 * aa.square() + zpp.square() + (zp / r).square())).sum();
  e.total = e.membrane + e.bending;
  if (grad == nullptr) return e;

  auto adj_s = [&g](const Eigen::ArrayXd& c) {
    return stencil::d_s_adj(g, col_mat(c)).col(0).eval();
  };
  auto adj_ss = [&g](const Eigen::ArrayXd& c) {
    return stencil::d_ss_adj(g, col_mat(c)).col(0).eval();
  };

  const Eigen::ArrayXd b_rpp = 2.0 * h2 * w * rpp / r.square();
  const Eigen::ArrayXd b_zpp = 2.0 * h2 * w * zpp / r.square();
  grad->rho = adj_s(4.0 * w * urr * rp / r) + 4.0 * w * upp * f.rho / r.square() +
              adj_ss(b_rpp) - adj_s(b_rpp) + adj_s(6.0 * h2 * w * aa / r.square()) -
              6.0 * h2 * w * aa / r.square();
  grad->z = adj_s(4.0 * w * urr * zp / r) + adj_ss(b_zpp) - adj_s(b_zpp) +
            adj_s(2.0 * h2 * w * (zp / r) / r.square());
  return e;
}

PlateProfile minimize_plate_profile(const Params& p, const PolarGrid& g,
                                    const OptimizerConfig& cfg) {
  const int n = g.n_r();
  const double gamma = std::sqrt(1.0 - p.delta * p.delta);
  Eigen::VectorXd x(2 * n);
  for (int k = 0; k < n; ++k) {
    x(k) = gamma * g.r(k);
    x(n + k) = p.delta * g.r(k);
  }

  const Oracle oracle = [&p, &g, n](const Eigen::VectorXd& xv, Eigen::VectorXd& gv) {
    PlateProfile f;
    f.rho = xv.head(n).array();
    f.z = xv.tail(n).array();
    PlateProfile df;
    const EnergyBreakdown e = plate_profile_energy(f, p, g, &df);
    gv.resize(2 * n);
    gv.head(n) = df.rho.matrix();
    gv.tail(n) = df.z.matrix();
    return e.total;
  };
  const PostStep post = [n](Eigen::VectorXd& xv) {
    xv.tail(n).array() -= xv.tail(n).mean();
  };

  if (cfg.restarts <= 0) {
    minimize(oracle, x, cfg, post);
  } else {
    const double amp = cfg.perturb_amplitude * std::max(x.lpNorm<Eigen::Infinity>(), 1e-3);
    const double s0 = std::log(g.r(0));
    const double span = std::log(g.r(n - 1)) - s0;
    const Perturber perturber = [&g, n, amp, s0, span](int restart, std::uint64_t seed) {
      std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (restart + 1)));
      std::normal_distribution<double> normal;
      Eigen::VectorXd dx(2 * n);
      for (int block = 0; block < 2; ++block)
        for (int k = 0; k < n; ++k) {
          const double shat = (std::log(g.r(k)) - s0) / span;
          double val = 0.0;
          for (int m = 1; m <= 3; ++m) val += normal(rng) * std::sin(kPi * m * shat);
          dx(block * n + k) = val;
        }
      const double sup = dx.lpNorm<Eigen::Infinity>();
      if (sup > 0.0) dx *= amp / sup;
      return dx;
    };
    minimize_with_restarts(oracle, x, cfg, perturber, post);
  }
  PlateProfile f;
  f.rho = x.head(n).array();
  f.z = x.tail(n).array();
  return f;
}

}  // namespace

int GridPolicy::n_r_for(double h) const {
  const double r_min = r_min_factor * h;
  if (!(r_min > 0.0) || !(r_min < 1.0)) throw UsageError("grid policy needs 0 < r_min < 1");
  const int n = static_cast<int>(std::ceil(nodes_per_decade * std::log10(1.0 / r_min)));
  return std::clamp(n, 8, n_r_cap);
}

PolarGrid GridPolicy::build(double h) const {
  return PolarGrid(n_r_for(h), n_phi, r_min_factor * h);
}

FvkState sample_fvk_ansatz(const Params& p, const PolarGrid& g) {
  FvkState s;
  s.u = make_vector2(g);
  s.v = make_scalar(g);
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      const FvkAnsatz a = ansatz_fvk(g.point(k, j), p);
      s.u.x(k, j) = a.u(0);
      s.u.y(k, j) = a.u(1);
      s.v.a(k, j) = a.v;
    }
  return s;
}

Map3 sample_plate_ansatz(const Params& p, const PolarGrid& g) {
  Map3 y = make_map3(g);
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      const PlateAnsatz a = ansatz_plate(g.point(k, j), p);
      for (int i = 0; i < 3; ++i) y.c[static_cast<std::size_t>(i)](k, j) = a.y(i);
    }
  return y;
}

Eigen::VectorXd pack(const FvkState& s) {
  Eigen::VectorXd x(s.u.x.size() + s.u.y.size() + s.v.a.size());
  Eigen::Index at = 0;
  put(x, at, s.u.x);
  put(x, at, s.u.y);
  put(x, at, s.v.a);
  return x;
}

Eigen::VectorXd pack(const Map3& y) {
  Eigen::VectorXd x(y.c[0].size() * 3);
  Eigen::Index at = 0;
  for (const auto& comp : y.c) put(x, at, comp);
  return x;
}

FvkState unpack_fvk(const Eigen::VectorXd& x, const PolarGrid& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.n_r()) * g.n_phi();
  if (x.size() != 3 * n) throw UsageError("state size does not match the grid");
  FvkState s;
  Eigen::Index at = 0;
  s.u.x = take(x, at, g);
  s.u.y = take(x, at, g);
  s.v.a = take(x, at, g);
  return s;
}

Map3 unpack_map3(const Eigen::VectorXd& x, const PolarGrid& g) {
  const Eigen::Index n = static_cast<Eigen::Index>(g.n_r()) * g.n_phi();
  if (x.size() != 3 * n) throw UsageError("state size does not match the grid");
  Map3 y;
  Eigen::Index at = 0;
  for (auto& comp : y.c) comp = take(x, at, g);
  return y;
}

Oracle fvk_oracle(const Params& p, const PolarGrid& g) {
  return [p, g](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const FvkState s = unpack_fvk(x, g);
    VectorField2 gu;
    ScalarField gv;
    const EnergyBreakdown e = fvk_gradient(s.u, s.v, p, g, gu, gv);
    grad.resize(x.size());
    Eigen::Index at = 0;
    put(grad, at, gu.x);
    put(grad, at, gu.y);
    put(grad, at, gv.a);
    return e.total;
  };
}

Oracle plate_oracle(const Params& p, const PolarGrid& g) {
  return [p, g](const Eigen::VectorXd& x, Eigen::VectorXd& grad) {
    const Map3 y = unpack_map3(x, g);
    Map3 gy;
    const EnergyBreakdown e = plate_gradient(y, p, g, gy);
    grad.resize(x.size());
    Eigen::Index at = 0;
    for (const auto& comp : gy.c) put(grad, at, comp);
    return e.total;
  };
}

PostStep mean_free_post_step(int n_fields) {
  return [n_fields](Eigen::VectorXd& x) {
    const Eigen::Index block = x.size() / n_fields;
    for (int f = 0; f < n_fields; ++f) {
      auto seg = x.segment(f * block, block);
      seg.array() -= seg.mean();
    }
  };
}

Eigen::VectorXd smooth_perturbation(const PolarGrid& g, int n_fields, double amplitude,
                                    std::uint64_t seed, int restart) {
  std::mt19937_64 rng(mix(seed, static_cast<std::uint64_t>(restart)));
  std::normal_distribution<double> normal;
  const Eigen::Index n = static_cast<Eigen::Index>(g.n_r()) * g.n_phi();
  Eigen::VectorXd out(n_fields * n);
  const double s0 = std::log(g.r(0));
  const double span = std::log(g.r(g.n_r() - 1)) - s0;
  Eigen::ArrayXd shat(g.n_r());
  for (int k = 0; k < g.n_r(); ++k) shat(k) = (std::log(g.r(k)) - s0) / span;
  Eigen::Index at = 0;
  for (int f = 0; f < n_fields; ++f) {
    Eigen::ArrayXXd field = Eigen::ArrayXXd::Zero(g.n_r(), g.n_phi());
    for (int m = 0; m <= 2; ++m) {
      const double a = normal(rng);
      const double b = normal(rng);
      const Eigen::ArrayXd bump = (kPi * (m + 1) * shat).sin();
      for (int j = 0; j < g.n_phi(); ++j) {
        const double ang = a * std::cos(m * g.phi(j)) + b * std::sin(m * g.phi(j));
        field.col(j) += ang * bump;
      }
    }
    const double sup = field.abs().maxCoeff();
    if (sup > 0.0) field *= amplitude / sup;
    out.segment(at, n) = flat(field);
    at += n;
  }
  return out;
}

namespace {

Eigen::ArrayXXd resample_component(const Eigen::ArrayXXd& a, const PolarGrid& from,
                                   const PolarGrid& to) {
  ScalarField f;
  f.a = a;
  return resample(f, from, to).a;
}

}  // namespace

FvkState resample_fields(const FvkState& s, const PolarGrid& from, const PolarGrid& to) {
  FvkState out;
  out.u.x = resample_component(s.u.x, from, to);
  out.u.y = resample_component(s.u.y, from, to);
  out.v.a = resample_component(s.v.a, from, to);
  return out;
}

Map3 resample_fields(const Map3& y, const PolarGrid& from, const PolarGrid& to) {
  Map3 out;
  for (std::size_t i = 0; i < 3; ++i) out.c[i] = resample_component(y.c[i], from, to);
  return out;
}

namespace {

OptimizeReport run_packed(const Oracle& oracle, Eigen::VectorXd& x, const PolarGrid& g,
                          const OptimizerConfig& cfg) {
  const PostStep post = mean_free_post_step(3);
  if (cfg.restarts <= 0) return minimize(oracle, x, cfg, post);
  const double scale = std::max(x.lpNorm<Eigen::Infinity>(), 1e-3);
  const double amp = cfg.perturb_amplitude * scale;
  const Perturber perturber = [&g, amp](int restart, std::uint64_t seed) {
    return smooth_perturbation(g, 3, amp, seed, restart);
  };
  return minimize_with_restarts(oracle, x, cfg, perturber, post);
}

}  // namespace

FvkStart fvk_start_fields(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                          const FvkState* prev, const PolarGrid* prev_grid) {
  FvkStart out;
  out.state = sample_fvk_ansatz(p, g);
  out.e_ansatz = fvk_energy(out.state.u, out.state.v, p, g).total;
  out.e_start = out.e_ansatz;
  if (prev != nullptr && prev_grid != nullptr) {
    FvkState warm = resample_fields(*prev, *prev_grid, g);
    const double e = fvk_energy(warm.u, warm.v, p, g).total;
    if (e < out.e_start) {
      out.state = std::move(warm);
      out.e_start = e;
      out.source = "previous";
    }
  }
  // The 1D reduction is cheap, so converge it hard before lifting.
  OptimizerConfig rc = cfg;
  rc.max_iters = std::max(cfg.max_iters, 30000);
  rc.plateau_window = std::max(cfg.plateau_window, 200);
  rc.energy_rel_tol = std::min(cfg.energy_rel_tol, 1e-13);
  rc.restarts = std::min(cfg.restarts, 2);
  const RadialResult rad = radial_minimize(p, g, rc);
  FvkState lifted = lift_to_2d(rad.fields, g, g);
  const double e = fvk_energy(lifted.u, lifted.v, p, g).total;
  if (e < out.e_start) {
    out.state = std::move(lifted);
    out.e_start = e;
    out.source = "radial";
  }
  return out;
}

PlateStart plate_start_fields(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                              const Map3* prev, const PolarGrid* prev_grid) {
  PlateStart out;
  out.y = sample_plate_ansatz(p, g);
  out.e_ansatz = plate_energy(out.y, p, g).total;
  out.e_start = out.e_ansatz;
  if (prev != nullptr && prev_grid != nullptr) {
    Map3 warm = resample_fields(*prev, *prev_grid, g);
    const double e = plate_energy(warm, p, g).total;
    if (e < out.e_start) {
      out.y = std::move(warm);
      out.e_start = e;
      out.source = "previous";
    }
  }
  OptimizerConfig rc = cfg;
  rc.max_iters = std::max(cfg.max_iters, 30000);
  rc.plateau_window = std::max(cfg.plateau_window, 200);
  rc.energy_rel_tol = std::min(cfg.energy_rel_tol, 1e-13);
  rc.restarts = std::min(cfg.restarts, 2);
  const PlateProfile prof = minimize_plate_profile(p, g, rc);
  Map3 cand = make_map3(g);
  for (int k = 0; k < g.n_r(); ++k)
    for (int j = 0; j < g.n_phi(); ++j) {
      cand.c[0](k, j) = prof.rho(k) * g.cos_phi()(j);
      cand.c[1](k, j) = prof.rho(k) * g.sin_phi()(j);
      cand.c[2](k, j) = prof.z(k);
    }
  const double e = plate_energy(cand, p, g).total;
  if (e < out.e_start) {
    out.y = std::move(cand);
    out.e_start = e;
    out.source = "radial";
  }
  return out;
}

FvkResult minimize_fvk(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                       const FvkState& start) {
  Eigen::VectorXd x = pack(start);
  FvkResult res;
  res.report = run_packed(fvk_oracle(p, g), x, g, cfg);
  res.state = unpack_fvk(x, g);
  res.energy = fvk_energy(res.state.u, res.state.v, p, g);
  return res;
}

PlateResult minimize_plate(const Params& p, const PolarGrid& g, const OptimizerConfig& cfg,
                           const Map3& start) {
  Eigen::VectorXd x = pack(start);
  PlateResult res;
  res.report = run_packed(plate_oracle(p, g), x, g, cfg);
  res.y = unpack_map3(x, g);
  res.energy = plate_energy(res.y, p, g);
  return res;
}

std::vector<ContinuationStep> continuation(Model model, double delta,
                                           const std::vector<double>& h_list,
                                           const GridPolicy& policy,
                                           const OptimizerConfig& cfg) {
  if (h_list.empty()) throw UsageError("continuation needs at least one h");
  std::vector<std::size_t> order(h_list.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return h_list[a] > h_list[b]; });

  std::vector<ContinuationStep> out;
  out.reserve(h_list.size());
  for (std::size_t i = 0; i < h_list.size(); ++i) {
    const double h = h_list[i];
    Params p;
    p.h = h;
    p.delta = delta;
    p.model = model;
    p.validate();
    out.push_back(ContinuationStep{h, policy.build(h), 0.0, EnergyBreakdown{},
                                   OptimizeReport{}, FvkState{}, Map3{}});
  }

  const ContinuationStep* prev = nullptr;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    ContinuationStep& step = out[order[rank]];
    Params p;
    p.h = step.h;
    p.delta = delta;
    p.model = model;
    OptimizerConfig step_cfg = cfg;
    step_cfg.grad_tol = cfg.grad_tol * step.h * step.h;
    step_cfg.seed = mix(cfg.seed, static_cast<std::uint64_t>(rank));

    if (model == Model::kFvk) {
      FvkStart start = fvk_start_fields(p, step.grid, step_cfg, prev ? &prev->fvk : nullptr,
                                        prev ? &prev->grid : nullptr);
      step.e_ansatz = start.e_ansatz;
      FvkResult res = minimize_fvk(p, step.grid, step_cfg, start.state);
      step.energy = res.energy;
      step.report = res.report;
      step.fvk = std::move(res.state);
    } else {
      PlateStart start = plate_start_fields(p, step.grid, step_cfg,
                                            prev ? &prev->plate : nullptr,
                                            prev ? &prev->grid : nullptr);
      step.e_ansatz = start.e_ansatz;
      PlateResult res = minimize_plate(p, step.grid, step_cfg, start.y);
      step.energy = res.energy;
      step.report = res.report;
      step.plate = std::move(res.y);
    }
    prev = &step;
  }
  return out;
}

}  // namespace disclin
