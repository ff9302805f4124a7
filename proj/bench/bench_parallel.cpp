// Threaded sweep and exploration against their single-threaded references.

#include <benchmark/benchmark.h>

#include <omp.h>

#include "chainsem/bundled.hpp"
#include "chainsem/explore.hpp"
#include "chainsem/scenario.hpp"

using namespace chainsem;

namespace {

const Scenario& scenario(const std::string& name) {
  static std::map<std::string, Scenario> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, load_scenario(bundled_scenario(name))).first;
  return it->second;
}

std::vector<SweepJob> jobs(std::size_t n) {
  std::vector<SweepJob> out;
  const std::vector<std::string> names = {"auction", "transfer", "originate", "timeout", "failures"};
  for (std::size_t i = 0; i < n; ++i) {
    const Scenario& s = scenario(names[i % names.size()]);
    out.push_back(SweepJob{&s.config, s.name, i + 1, static_cast<Policy>(i % 3), 200});
  }
  return out;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto js = jobs(static_cast<std::size_t>(state.range(0)));
  std::size_t steps = 0;
  for (auto _ : state) {
    SweepResult r = sweep_serial(js, CheckSet::all());
    steps += r.steps;
    benchmark::DoNotOptimize(r.runs);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
}

void BM_SweepParallel(benchmark::State& state) {
  const auto js = jobs(static_cast<std::size_t>(state.range(0)));
  std::size_t steps = 0;
  for (auto _ : state) {
    SweepResult r = sweep(js, CheckSet::all());
    steps += r.steps;
    benchmark::DoNotOptimize(r.runs);
  }
  state.counters["steps/s"] = benchmark::Counter(static_cast<double>(steps), benchmark::Counter::kIsRate);
  state.counters["threads"] = omp_get_max_threads();
}

void BM_Explore(benchmark::State& state, const char* name, std::size_t depth, bool parallel) {
  const Scenario& s = scenario(name);
  ExploreOptions o;
  o.depth = depth;
  std::size_t states = 0;
  for (auto _ : state) {
    ExploreReport r = parallel ? explore(s.config, o) : explore_serial(s.config, o);
    states += r.states;
    benchmark::DoNotOptimize(r.states);
  }
  state.counters["states/s"] = benchmark::Counter(static_cast<double>(states), benchmark::Counter::kIsRate);
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, two_transfers_serial, "two_transfers", 20, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, two_transfers_parallel, "two_transfers", 20, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, auction1_serial, "auction1", 1000, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, auction1_parallel, "auction1", 1000, true)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, auction_d12_serial, "auction", 12, false)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Explore, auction_d12_parallel, "auction", 12, true)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
