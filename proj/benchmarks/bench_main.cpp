#include <benchmark/benchmark.h>

#include "fsilab/fixed_point.hpp"
#include "fsilab/fs_operator.hpp"
#include "fsilab/scenario.hpp"

using namespace fsilab;

static void BM_AssembleAFS(benchmark::State& state) {
  const Grid2D g(1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_AFS(g, PhysParams{}));
}
BENCHMARK(BM_AssembleAFS)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_ResolventFactorSolve(benchmark::State& state) {
  const Grid2D g(1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const OperatorMatrix A = assemble_AFS(g, PhysParams{});
  const ComplexVector b = ComplexVector::Ones(A.size());
  for (auto _ : state) {
    const Resolvent R(A, Complex(1.0, 2.0));
    benchmark::DoNotOptimize(R.solve(b));
  }
}
BENCHMARK(BM_ResolventFactorSolve)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_LocalIteration(benchmark::State& state) {
  const Grid2D g(1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const DiffOps ops = diff_ops(g);
  const PhysParams p;
  const FullState init = to_full_values(scenario_library(g, "beam-pluck", 1e-3), p);
  IterationConfig c;
  c.T = 0.01;
  c.dt = 1e-3;
  for (auto _ : state) benchmark::DoNotOptimize(run_local(g, ops, p, init, c));
}
BENCHMARK(BM_LocalIteration)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SpectrumXm(benchmark::State& state) {
  const Grid2D g(1.0, 1.0, static_cast<int>(state.range(0)), static_cast<int>(state.range(0)));
  const OperatorMatrix A = assemble_AFS(g, PhysParams{});
  for (auto _ : state) benchmark::DoNotOptimize(spectrum(A, Domain::Xm));
}
BENCHMARK(BM_SpectrumXm)->Arg(8)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_DataNorm(benchmark::State& state) {
  const Grid2D g(1.0, 1.0, 64, 64);
  const DiffOps ops = diff_ops(g);
  const FullState s = scenario_library(g, "beam-pluck", 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(data_norm(g, ops, s, Mode::global, 4.0));
}
BENCHMARK(BM_DataNorm);

BENCHMARK_MAIN();
