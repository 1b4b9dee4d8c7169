#include <benchmark/benchmark.h>

#include "adbar/beltrami.hpp"
#include "adbar/dbar.hpp"
#include "adbar/scattering.hpp"

using namespace adbar;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(0) ? Execution::parallel : Execution::serial;
}

const HilbertMatrices& test1_hilbert() {
  static const HilbertMatrices H =
      build_hilbert(assemble_dn(build_mesh(6), phantoms::two_inclusions(), 16));
  return H;
}

const ScatteringData& test1_scattering() {
  static const ScatteringData d = compute_scattering(test1_hilbert(), KGrid(5.0, 6));
  return d;
}

void BM_VoltageTable(benchmark::State& state) {
  const NeumannSolver solver(build_mesh(6), as_function(phantoms::two_inclusions()), 16);
  for (auto _ : state) benchmark::DoNotOptimize(solver.voltage_table(mode(state)));
}
BENCHMARK(BM_VoltageTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Scattering(benchmark::State& state) {
  const KGrid grid(4.0, 5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_scattering(test1_hilbert(), grid, {}, mode(state)));
}
BENCHMARK(BM_Scattering)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_CgoGmres(benchmark::State& state) {
  const TrigTransform tr(16, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_cgo_trace(test1_hilbert(), {2.0, 1.0}, Branch::plus, tr));
}
BENCHMARK(BM_CgoGmres)->Unit(benchmark::kMicrosecond);

void BM_CgoDenseLU(benchmark::State& state) {
  const TrigTransform tr(16, 256);
  for (auto _ : state)
    benchmark::DoNotOptimize(solve_cgo_trace_dense(test1_hilbert(), {2.0, 1.0}, Branch::plus, tr));
}
BENCHMARK(BM_CgoDenseLU)->Unit(benchmark::kMicrosecond);

void BM_DbarSolve(benchmark::State& state) {
  const DbarWorkspace ws(test1_scattering());
  for (auto _ : state) benchmark::DoNotOptimize(ws.solve({-0.4, 0.1}));
}
BENCHMARK(BM_DbarSolve)->Unit(benchmark::kMillisecond);

void BM_Reconstruct(benchmark::State& state) {
  const DbarWorkspace ws(test1_scattering());
  for (auto _ : state)
    benchmark::DoNotOptimize(reconstruct(ws, ReconstructionGrid::make(1.2, 16), mode(state)));
}
BENCHMARK(BM_Reconstruct)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Beltrami(benchmark::State& state) {
  const auto field = phantoms::two_inclusions();
  for (auto _ : state) benchmark::DoNotOptimize(solve_beltrami(field, {2.0, 256}, mode(state)));
}
BENCHMARK(BM_Beltrami)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
