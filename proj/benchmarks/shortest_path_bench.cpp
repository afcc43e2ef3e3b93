#include <benchmark/benchmark.h>

#include "satkit/shortest_path.hpp"

namespace {

// Graph size fixed per run, edge density 0.2, one graph per size.
void BM_Encode(benchmark::State& state) {
  const int variant = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const satkit::DiGraph g = satkit::random_digraph(n, 0.2, 7);
  std::size_t clauses = 0;
  for (auto _ : state) {
    auto e = satkit::encode_variant(g, variant);
    clauses = e.cnf.num_clauses();
    benchmark::DoNotOptimize(clauses);
  }
  state.counters["clauses"] = static_cast<double>(clauses);
}

void BM_Solve(benchmark::State& state) {
  const int variant = static_cast<int>(state.range(0));
  const int n = static_cast<int>(state.range(1));
  const satkit::DiGraph g = satkit::random_digraph(n, 0.2, 7);
  for (auto _ : state) {
    auto r = satkit::solve_shortest_path(g, variant);
    benchmark::DoNotOptimize(r);
  }
}

void Sizes(benchmark::internal::Benchmark* b) {
  for (int variant = 1; variant <= 4; ++variant)
    for (int n : {8, 12, 16, 20}) b->Args({variant, n});
  b->ArgNames({"variant", "n"})->Unit(benchmark::kMillisecond);
}

}  // namespace

BENCHMARK(BM_Encode)->Apply(Sizes);
BENCHMARK(BM_Solve)->Apply(Sizes);
