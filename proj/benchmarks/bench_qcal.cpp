#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "qcal/hybrid.hpp"
#include "qcal/reduction.hpp"
#include "qcal/rng.hpp"
#include "qcal/trajectory.hpp"

using namespace qcal;

namespace {

void BM_PhiloxUniform(benchmark::State& state) {
  Philox4x64 rng(1, 2);
  for (auto _ : state) benchmark::DoNotOptimize(rng.uniform());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_PhiloxUniform);

// Cost per tick of a full trajectory; items are ticks.
void BM_TrajectoryTicks(benchmark::State& state) {
  const PhysicalParams p = PhysicalParams::defaults();
  TrajectoryOptions o;
  o.frame = state.range(1) == 0 ? Frame::rotating : Frame::lab;
  o.dt = o.frame == Frame::lab ? 1.0 / (1000.0 * p.omega()) : 1e-12;
  o.stride = 1000000;
  o.log_jumps = false;
  o.horizon = static_cast<double>(state.range(0)) * o.dt;
  HybridState init;
  init.x = p.phonon_temp * p.phonon_temp;
  std::uint64_t stream = 0;
  for (auto _ : state) {
    o.stream = stream++;
    benchmark::DoNotOptimize(run_trajectory(init, o, p));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrajectoryTicks)->Args({100000, 0})->Args({100000, 1})->Unit(benchmark::kMillisecond);

// One generator application; items are grid nodes.
void BM_HybridGeneratorApply(benchmark::State& state) {
  const PhysicalParams p = PhysicalParams::defaults();
  const double tp2 = p.phonon_temp * p.phonon_temp;
  const XGrid grid = build_grid(p, tp2 - 0.0075, tp2 + 0.04, static_cast<int>(state.range(0)));
  const HybridGenerator gen(grid, p, Frame::rotating);
  const HybridDensity rho = gibbs_point_density(grid, p, tp2);
  std::vector<Mat2> out(grid.n);
  for (auto _ : state) benchmark::DoNotOptimize(gen.apply(rho.blocks, 0.0, out));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.n));
}
BENCHMARK(BM_HybridGeneratorApply)->Arg(7)->Arg(40);

void BM_FpPoint(benchmark::State& state) {
  const PhysicalParams p = PhysicalParams::defaults();
  CorrectionOptions opt;
  opt.route = state.range(0) == 0 ? CorrectionRoute::resolvent : CorrectionRoute::spectral;
  for (auto _ : state) benchmark::DoNotOptimize(fp_point(0.05, p, opt));
}
BENCHMARK(BM_FpPoint)->Arg(0)->Arg(1);

// Coefficients, stationary density and roots on n nodes.
void BM_SolveStationary(benchmark::State& state) {
  const PhysicalParams p = PhysicalParams::defaults();
  const double x_max = 36.0 * p.phonon_temp * p.phonon_temp;
  const auto nodes = uniform_nodes(3.0 * p.jump_quantum(), x_max, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_stationary(nodes, p));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SolveStationary)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
