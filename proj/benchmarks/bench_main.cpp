// Microbenchmarks for the three hot paths: the span power-evolution solver,
// the nonlinear-interference quadrature, and the segmented objective with its
// analytic gradient. Run with --benchmark_filter=... to pick one.

#include <vector>

#include <benchmark/benchmark.h>

#include "uwdm/channel_grid.hpp"
#include "uwdm/fibre_profile.hpp"
#include "uwdm/isrs_solver.hpp"
#include "uwdm/nli_engine.hpp"
#include "uwdm/power_optimizer.hpp"

namespace {

using namespace uwdm;

void BM_SpanSolve(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ChannelGrid grid = build_grid(n);
  FibreProfile fibre = make_default_profile();
  std::vector<double> launch(static_cast<size_t>(n), 1.0);
  SolverOptions options;
  for (auto _ : state) {
    auto ev = solve_span(grid, launch, fibre, 80.0, options);
    benchmark::DoNotOptimize(ev.rho.data());
  }
  state.counters["channels"] = n;
}
BENCHMARK(BM_SpanSolve)->Arg(29)->Arg(116)->Arg(390)->Unit(benchmark::kMillisecond);

void BM_NliQuadrature(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  ChannelGrid grid = build_grid(n);
  FibreProfile fibre = make_default_profile();
  std::vector<double> launch(static_cast<size_t>(n), 1.0);
  SolverOptions sopt;
  sopt.z_spacing_km = 0.1 / 1.4;
  auto ev = solve_span(grid, launch, fibre, 80.0, sopt);
  NliConfig config;
  config.n_r = static_cast<int>(state.range(1));
  config.threads = 1;
  for (auto _ : state) {
    auto result = compute_nli(grid, launch, fibre, ev, 1, config);
    benchmark::DoNotOptimize(result.eta_per_mw2.data());
  }
  state.counters["channels"] = n;
  state.counters["n_r"] = config.n_r;
}
BENCHMARK(BM_NliQuadrature)
    ->Args({29, 48})
    ->Args({29, 150})
    ->Args({116, 48})
    ->Unit(benchmark::kMillisecond);

void BM_ObjectiveGradient(benchmark::State& state) {
  ChannelGrid grid = build_grid(static_cast<int>(state.range(0)));
  const size_t n = static_cast<size_t>(grid.size());
  std::vector<double> eta(n, 2e-4), ase(n, 0.002);
  PowerProfileEdges edges = segment_layout(grid, SegmentMode::kTable1);
  std::vector<double> edge_dbm(edges.freq_thz.size(), 0.0);
  for (auto _ : state) {
    auto out = edge_objective(grid, SegmentMode::kTable1, edge_dbm, eta, ase,
                              20.0, 25.0);
    benchmark::DoNotOptimize(out.gradient_per_dbm.data());
  }
  state.counters["channels"] = grid.size();
  state.counters["edges"] = static_cast<double>(edge_dbm.size());
}
BENCHMARK(BM_ObjectiveGradient)->Arg(29)->Arg(390)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
