// Parallel analysis against the serial reference on synthetic workloads.
#include <benchmark/benchmark.h>

#include <map>

#include "racewitness/m2.hpp"
#include "racewitness/synth.hpp"

namespace {

const rw::Trace& workload(std::int64_t events) {
  static std::map<std::int64_t, rw::Trace> cache;
  auto it = cache.find(events);
  if (it == cache.end()) {
    rw::SynthParams p;
    p.events = static_cast<std::uint64_t>(events);
    p.racy_rate = 0.002;
    it = cache.emplace(events, rw::build_trace(rw::synthetic_events(7, p))).first;
  }
  return it->second;
}

void BM_m2_serial(benchmark::State& state) {
  const rw::Trace& t = workload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rw::m2_serial(t).z.size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_m2_parallel(benchmark::State& state) {
  const rw::Trace& t = workload(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(rw::m2(t).z.size());
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_m2_serial)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_m2_parallel)->Arg(20000)->Arg(200000)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
