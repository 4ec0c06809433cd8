#include <benchmark/benchmark.h>

#include "disclin/curvature.hpp"
#include "disclin/energy.hpp"
#include "disclin/grid.hpp"
#include "disclin/optimize.hpp"
#include "disclin/params.hpp"
#include "disclin/radial.hpp"
#include "disclin/solver.hpp"

namespace {

using namespace disclin;

Params bench_params() {
  Params p;
  p.h = 0.02;
  p.delta = 0.5;
  return p;
}

void BM_FvkEnergy(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 256, p.h);
  const FvkState s = sample_fvk_ansatz(p, g);
  for (auto _ : state) benchmark::DoNotOptimize(fvk_energy(s.u, s.v, p, g).total);
  state.SetItemsProcessed(state.iterations() * g.n_r() * g.n_phi());
}

void BM_FvkGradient(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 256, p.h);
  const FvkState s = sample_fvk_ansatz(p, g);
  VectorField2 gu = make_vector2(g);
  ScalarField gv = make_scalar(g);
  for (auto _ : state) benchmark::DoNotOptimize(fvk_gradient(s.u, s.v, p, g, gu, gv).total);
  state.SetItemsProcessed(state.iterations() * g.n_r() * g.n_phi());
}

void BM_PlateGradient(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 256, p.h);
  const Map3 y = sample_plate_ansatz(p, g);
  Map3 gy = make_map3(g);
  for (auto _ : state) benchmark::DoNotOptimize(plate_gradient(y, p, g, gy).total);
  state.SetItemsProcessed(state.iterations() * g.n_r() * g.n_phi());
}

void BM_KappaRings(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 256, p.h);
  const FvkState s = sample_fvk_ansatz(p, g);
  for (auto _ : state) benchmark::DoNotOptimize(kappa_rings_fvk(s.v, g).sum());
}

void BM_Kl3dEnergy(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 256, p.h);
  for (auto _ : state) benchmark::DoNotOptimize(kl3d_energy(p, g, 4));
}

void BM_RadialMinimize(benchmark::State& state) {
  const Params p = bench_params();
  const PolarGrid g(static_cast<int>(state.range(0)), 8, p.h);
  OptimizerConfig cfg;
  cfg.grad_tol = 1e-4 * p.h * p.h;
  cfg.restarts = 0;
  for (auto _ : state) benchmark::DoNotOptimize(radial_minimize(p, g, cfg).energy.total);
}

}  // namespace

BENCHMARK(BM_FvkEnergy)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FvkGradient)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PlateGradient)->Arg(128)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_KappaRings)->Arg(256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Kl3dEnergy)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RadialMinimize)->Arg(257)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
