#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "cebound/cebound.hpp"

namespace {

using namespace cebound;

BlockState state_for(benchmark::State& st) {
  const Index d = static_cast<Index>(st.range(0));
  return random_block_state(d, d, 42);
}

void BM_CoherenceEntropy(benchmark::State& st) {
  const BlockState s = state_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(coherence_entropy(s));
}
BENCHMARK(BM_CoherenceEntropy)->Arg(2)->Arg(4)->Arg(8);

void BM_BkmForm(benchmark::State& st) {
  const BlockState s = state_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(bkm_form(s.a(), s.c(), s.b()));
}
BENCHMARK(BM_BkmForm)->Arg(2)->Arg(4)->Arg(8);

void BM_BkmQuadrature(benchmark::State& st) {
  const BlockState s = state_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(bkm_quadrature(s.a(), s.c(), s.b()));
}
BENCHMARK(BM_BkmQuadrature)->Arg(2)->Arg(4);

void BM_BoundReport(benchmark::State& st) {
  const BlockState s = state_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(bound_report(s));
}
BENCHMARK(BM_BoundReport)->Arg(2)->Arg(4)->Arg(8);

void BM_PolygonPhases(benchmark::State& st) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> l(static_cast<std::size_t>(st.range(0)));
  double total = 0.0;
  for (double& x : l) total += (x = u(rng));
  for (auto _ : st) benchmark::DoNotOptimize(polygon_phases(l, 0.5 * total));
}
BENCHMARK(BM_PolygonPhases)->Arg(4)->Arg(16)->Arg(64);

void BM_MergeChannel(benchmark::State& st) {
  MergeSpec spec;
  spec.a0 = 0.05;
  spec.eps_rem = 0.01;
  for (int j = 0; j < st.range(0); ++j) spec.blocks.push_back({0.1 + 0.01 * j, 0.01, 0.5e-3});
  for (auto _ : st) benchmark::DoNotOptimize(merge_channel(spec));
}
BENCHMARK(BM_MergeChannel)->Arg(2)->Arg(4)->Arg(8);

void BM_PipelineChain(benchmark::State& st) {
  const BlockState s = state_for(st);
  for (auto _ : st) benchmark::DoNotOptimize(pipeline_chain(s));
}
BENCHMARK(BM_PipelineChain)->Arg(2)->Arg(4);

void BM_OrbitTrace(benchmark::State& st) {
  const OrbitConfig cfg{random_block_state(3, 3, 42), 1.0, 1.0, static_cast<int>(st.range(0))};
  for (auto _ : st) benchmark::DoNotOptimize(orbit_trace(cfg));
}
BENCHMARK(BM_OrbitTrace)->Arg(20)->Arg(100);

} // namespace

BENCHMARK_MAIN();
