#include <benchmark/benchmark.h>

#include "catchup/fimo.hpp"
#include "catchup/scenario.hpp"
#include "catchup/sdp.hpp"
#include "catchup/synthesis.hpp"

using namespace catchup;

namespace {

const double kX0[2] = {-0.04, 0.175};

const synthesis::GuaranteedSolution& cached_solution() {
  static const auto sol = synthesis::synthesize(fimo::build_canonical({}), kX0);
  return sol;
}

void BM_PlayerLmiFeasibility(benchmark::State& state) {
  const auto m = fimo::build_canonical({});
  const auto& s = cached_solution();
  const auto lmi = synthesis::build_player_lmi(m, s.gains[0], s.gains[1], 1);
  for (auto _ : state) {
    auto r = sdp::solve_feasibility(lmi.problem, 1e-8);
    benchmark::DoNotOptimize(r.margin);
  }
}
BENCHMARK(BM_PlayerLmiFeasibility)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const auto m = fimo::build_canonical({});
  for (auto _ : state) {
    auto s = synthesis::synthesize(m, kX0);
    benchmark::DoNotOptimize(s.gain_residual);
  }
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond)->Iterations(3);

void BM_NineScenarios(benchmark::State& state) {
  const auto& s = cached_solution();
  scenario::ScenarioSpec base;
  base.realization = uncertainty::RealizationKind::kRandom;
  for (auto _ : state) {
    auto all = scenario::run_all_nine(base, s, {});
    benchmark::DoNotOptimize(all.data());
  }
}
BENCHMARK(BM_NineScenarios)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
