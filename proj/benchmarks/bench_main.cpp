#include <benchmark/benchmark.h>

#include "vlab/approx_system.hpp"
#include "vlab/biot_savart.hpp"
#include "vlab/diagnostics.hpp"
#include "vlab/navier_stokes.hpp"
#include "vlab/oseen_elliptic.hpp"

using namespace vlab;

namespace {

void BM_FreeSpaceVelocity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid2D g(16.0, n);
  auto plan = poisson_plan(g);
  const ScalarField w = heat_kernel_field(g, {0.0, 0.0}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(plan->velocity(w));
}
BENCHMARK(BM_FreeSpaceVelocity)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_NSStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid2D g(16.0, n);
  NSStepper ns(g);
  NSState s = ns.init(bump_field(g, {2.5, 0.0}, 1.0, 1.0), {0.0, 0.0}, 0.05,
                      0.32 * (512.0 / n) * (512.0 / n), 1.0);
  for (auto _ : state) {
    NSState t = s;
    ns.step(t, 1e-3);
    benchmark::DoNotOptimize(t.omega_b.values.data());
  }
}
BENCHMARK(BM_NSStep)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_AVWStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Grid2D g(16.0, n);
  AVWStepper avw(g);
  ApproxVWState s = avw.init(bump_field(g, {2.5, 0.0}, 1.0, 1.0), {0.0, 0.0}, 0.05);
  avw.step(s, 1e-3);
  for (auto _ : state) {
    ApproxVWState t = s;
    avw.step(t, 1e-3);
    benchmark::DoNotOptimize(t.w1a.values.data());
  }
}
BENCHMARK(BM_AVWStep)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_RadialSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  RadialOseenSolver solver(16.0, m);
  std::vector<double> ra(solver.nodes().size()), zero(solver.nodes().size(), 0.0);
  for (std::size_t j = 0; j < ra.size(); ++j) {
    const double r = solver.nodes()[j];
    ra[j] = r * r * std::exp(-0.25 * r * r);
  }
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve_mode(2, ra, zero, 0.05));
}
BENCHMARK(BM_RadialSolve)->Arg(16384)->Arg(131072)->Unit(benchmark::kMillisecond);

void BM_RescaleToCore(benchmark::State& state) {
  Grid2D g(16.0, 512), xg(32.0, 256);
  const ScalarField wb = heat_kernel_field(g, {0.0, 0.0}, 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(rescale_to_core(wb, {0.0, 0.0}, 0.05, 0.25, xg));
}
BENCHMARK(BM_RescaleToCore)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
