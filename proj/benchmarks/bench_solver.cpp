#include <benchmark/benchmark.h>

#include "retsolve/free_boundary.hpp"
#include "retsolve/policy.hpp"
#include "retsolve/simulate.hpp"

namespace {

using namespace retsolve;

RawParams baseline() {
  RawParams raw;
  raw.r = 0.02;
  raw.mu = 0.06;
  raw.sigma = 0.2;
  raw.rho = 0.03;
  raw.gamma = 2.0;
  raw.delta = 0.03;
  raw.y1 = 1.0;
  raw.y2 = 0.0;
  raw.support_l = 1.2;
  return raw;
}

const SolvedModel& model() {
  static const SolvedModel m = solve_model(ModelParams::validate(baseline()));
  return m;
}

void BM_SolveModel(benchmark::State& state) {
  const ModelParams p = ModelParams::validate(baseline());
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_model(p));
  }
}
BENCHMARK(BM_SolveModel);

void BM_PolicyTable(benchmark::State& state) {
  const SolvedModel& m = model();
  GridSpec grid;
  grid.n = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(policy_table(m, grid));
  }
}
BENCHMARK(BM_PolicyTable)->Arg(200)->Arg(2000);

void BM_Premium(benchmark::State& state) {
  const SolvedModel& m = model();
  double z = *m.boundary.z_bar;
  for (auto _ : state) {
    z = z < 4.0 ? z * 1.001 : *m.boundary.z_bar;
    benchmark::DoNotOptimize(m.stopping.premium(z, m.boundary));
  }
}
BENCHMARK(BM_Premium);

void BM_BudgetCheck(benchmark::State& state) {
  const SolvedModel& m = model();
  SimConfig cfg;
  cfg.n_paths = state.range(0);
  cfg.horizon_years = 10.0;
  cfg.dt = 1.0 / 52.0;
  cfg.master_seed = 7;
  cfg.z0 = 0.5;
  cfg.phase = Phase::PostRetirement;
  for (auto _ : state) {
    benchmark::DoNotOptimize(budget_check(m, cfg, 1));
  }
}
BENCHMARK(BM_BudgetCheck)->Arg(256)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
