#include <benchmark/benchmark.h>

#include "rootrecon/ctmc.hpp"

namespace {

// Uniformization cost grows with |S| and with t * max exit rate.
void bm_transition_matrix(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto q = rootrecon::uniform_chain(n, 1.0 / static_cast<double>(n - 1));
  auto t = static_cast<double>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rootrecon::transition_matrix(q, t));
  }
}
BENCHMARK(bm_transition_matrix)->ArgsProduct({{2, 4, 20, 60}, {1, 10}});

void bm_identifiability_margin(benchmark::State& state) {
  auto n = static_cast<std::size_t>(state.range(0));
  auto q = rootrecon::uniform_chain(n, 0.5);
  auto subset = std::vector<rootrecon::State>(n);
  for (auto i = std::size_t{0}; i < n; ++i) subset[i] = static_cast<rootrecon::State>(i);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rootrecon::identifiability_margin(q, 1.0, subset));
  }
}
BENCHMARK(bm_identifiability_margin)->Arg(4)->Arg(20);

}  // namespace
