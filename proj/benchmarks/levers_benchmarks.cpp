#include <benchmark/benchmark.h>

#include <random>
#include <set>
#include <string>

#include "levers/controllability.hpp"
#include "levers/dynamics.hpp"
#include "levers/matching.hpp"

namespace {

using namespace levers;

// n factors and `links` distinct random links, no self-loops.
FcmGraph sparse_graph(std::size_t n, std::size_t links, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = "n" + std::to_string(100000 + i);
    factors.push_back({id, id});
  }
  std::set<std::pair<std::size_t, std::size_t>> chosen;
  while (chosen.size() < links) {
    const auto s = pick(rng), t = pick(rng);
    if (s != t) chosen.emplace(s, t);
  }
  std::vector<Influence> influences;
  for (const auto& [s, t] : chosen) influences.push_back({factors[s].id, factors[t].id});
  return FcmGraph(std::move(factors), std::move(influences));
}

void BM_HopcroftKarp(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto bipartite = to_bipartite(sparse_graph(n, 2 * n, 1));
  for (auto _ : state) benchmark::DoNotOptimize(hopcroft_karp(bipartite).cardinality);
}
BENCHMARK(BM_HopcroftKarp)->Arg(200)->Arg(2000)->Arg(20000);

void BM_ClassifyNodes(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto graph = sparse_graph(n, 2 * n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(classify_nodes(graph));
}
BENCHMARK(BM_ClassifyNodes)->Arg(50)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_EnumerateTwentyNodes(benchmark::State& state) {
  const auto graph = sparse_graph(20, 40, static_cast<unsigned>(state.range(0)));
  EnumerationOptions options;
  options.workers = 1;
  std::size_t found = 0;
  for (auto _ : state) found = enumerate_configurations(graph, options).configurations.size();
  state.counters["configurations"] = static_cast<double>(found);
}
BENCHMARK(BM_EnumerateTwentyNodes)->DenseRange(1, 4)->Unit(benchmark::kMillisecond);

void BM_SigmoidFixedPoint(benchmark::State& state) {
  const auto graph = sparse_graph(static_cast<std::size_t>(state.range(0)), 3 * state.range(0), 3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(iterate_to_fixed_point(graph, {MappingKind::Sigmoid, 1.0}));
  }
}
BENCHMARK(BM_SigmoidFixedPoint)->Arg(16)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
