// Serial reference against the OpenMP assembly loops. With one core the two should
// agree in time; the ratio is the parallel efficiency on larger machines.

#include <benchmark/benchmark.h>

#include <memory>

#include "fbem/assembly.hpp"

namespace {

using namespace fbem;

std::shared_ptr<const FunctionSpace> cantor_space(int level, SpaceKind kind, int refine) {
  auto mesh = std::make_shared<const Mesh>(mesh_panels(cantor_dust_prefractal(1.0 / 3.0, level), refine));
  return std::make_shared<const FunctionSpace>(build_space(mesh, kind));
}

void single_layer(benchmark::State& state, Execution execution) {
  const auto space = cantor_space(static_cast<int>(state.range(0)), SpaceKind::P0Jump, 0);
  const Wavenumber k(Complex(2.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_single_layer(*space, k, {}, execution).data());
  state.counters["dofs"] = static_cast<double>(space->dof_count());
}

void hypersingular(benchmark::State& state, Execution execution) {
  const auto space = cantor_space(1, SpaceKind::P1ZeroTrace, static_cast<int>(state.range(0)));
  const Wavenumber k(Complex(2.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_hypersingular(*space, k, {}, execution).data());
  state.counters["dofs"] = static_cast<double>(space->dof_count());
}

void BM_SingleLayerSerial(benchmark::State& s) { single_layer(s, Execution::Serial); }
void BM_SingleLayerParallel(benchmark::State& s) { single_layer(s, Execution::Parallel); }
void BM_HypersingularSerial(benchmark::State& s) { hypersingular(s, Execution::Serial); }
void BM_HypersingularParallel(benchmark::State& s) { hypersingular(s, Execution::Parallel); }

BENCHMARK(BM_SingleLayerSerial)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SingleLayerParallel)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HypersingularSerial)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HypersingularParallel)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
