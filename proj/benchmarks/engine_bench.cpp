#include <benchmark/benchmark.h>

#include <random>

#include "oee/dynamics.hpp"
#include "oee/run.hpp"

using namespace oee;

namespace {

SystemModel warmed_model(std::size_t e, int ticks) {
  RunConfig c;
  c.e = e;
  c.env_e = e / 10;
  c.n0 = e / 10;
  c.seed = 1;
  auto m = build_model(c);
  for (int t = 0; t < ticks; ++t) m.step();
  return m;
}

}  // namespace

static void BM_Step(benchmark::State& state) {
  auto m = warmed_model(static_cast<std::size_t>(state.range(0)), 2000);
  for (auto _ : state) benchmark::DoNotOptimize(m.step());
  state.counters["rules"] = static_cast<double>(m.rules()->size());
}
BENCHMARK(BM_Step)->Arg(200)->Arg(1000);

static void BM_ApplyUpdateFullScan(benchmark::State& state) {
  const auto m = warmed_model(200, 2000);
  Rng rng(0);
  for (auto _ : state) benchmark::DoNotOptimize(apply_update(*m.rules(), *m.entities(), rng));
}
BENCHMARK(BM_ApplyUpdateFullScan);

static void BM_ApplyUpdateIncremental(benchmark::State& state) {
  const auto m = warmed_model(200, 2000);
  auto sigma = *m.entities();
  auto activity = *m.activity();
  Rng rng(0);
  Tick t = 0;
  for (auto _ : state) benchmark::DoNotOptimize(apply_update(*m.rules(), sigma, activity, rng, ++t));
}
BENCHMARK(BM_ApplyUpdateIncremental);

static void BM_Simulate(benchmark::State& state) {
  RunConfig c;
  c.ticks = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(simulate(c));
}
BENCHMARK(BM_Simulate)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

static void BM_FitPowerLaw(benchmark::State& state) {
  std::mt19937_64 gen(3);
  std::geometric_distribution<std::uint64_t> geo(0.3);
  std::vector<std::uint64_t> x(static_cast<std::size_t>(state.range(0)));
  for (auto& v : x) v = geo(gen) + 1;
  for (auto _ : state) benchmark::DoNotOptimize(fit_power_law(x, 1));
}
BENCHMARK(BM_FitPowerLaw)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
