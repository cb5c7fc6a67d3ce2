#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <vector>

#include "eesched/channel.hpp"
#include "eesched/dp_solver.hpp"
#include "eesched/policies.hpp"
#include "eesched/policy.hpp"
#include "eesched/simulator.hpp"

using namespace eesched;

namespace {
const ChannelModel kTruncExp = ChannelModel::truncated_exponential(1.0, 0.001);
}

static void BM_ExpectInverseGain(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(expect(kTruncExp, [](double g) { return 1.0 / g; }));
}
BENCHMARK(BM_ExpectInverseGain);

static void BM_Moments(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(moments(kTruncExp, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_Moments)->Arg(8)->Arg(64);

static void BM_DpSolve(benchmark::State& state) {
  DpConfig c;
  c.max_bits = 10.0;
  c.grid_points = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve(kTruncExp, c, 3));
}
BENCHMARK(BM_DpSolve)->Arg(257)->Arg(1025)->Unit(benchmark::kMillisecond);

static void BM_IwfAllocate(benchmark::State& state) {
  Rng rng(1);
  std::vector<double> gains(static_cast<std::size_t>(state.range(0)));
  for (auto& g : gains) g = kTruncExp.sample(rng);
  for (auto _ : state) benchmark::DoNotOptimize(iwf_allocate(20.0, gains));
}
BENCHMARK(BM_IwfAllocate)->Arg(5)->Arg(50);

static void BM_Simulate(benchmark::State& state) {
  auto m = std::make_shared<const MomentTable>(moments(kTruncExp, 8));
  const std::vector<Policy> policies{Policy::equal_bit(), Policy::suboptimal_I(m), Policy::suboptimal_II(m),
                                     Policy::iwf()};
  SimulationConfig c;
  c.bits = 10.0;
  c.horizon = 5;
  c.episodes = 10'000;
  for (auto _ : state) benchmark::DoNotOptimize(run(policies, kTruncExp, c));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.episodes));
}
BENCHMARK(BM_Simulate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
