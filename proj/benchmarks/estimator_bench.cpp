#include <benchmark/benchmark.h>

#include "rootrecon/estimators.hpp"
#include "rootrecon/families.hpp"
#include "rootrecon/treechain.hpp"

namespace {

// One frequency-test reconstruction with a precomputed plan and test, as in the
// experiment loop.
void bm_frequency_estimate(benchmark::State& state) {
  auto k = static_cast<int>(state.range(0));
  auto tree = rootrecon::generate_family(rootrecon::Family_kind::figure1, {.k = k}).back();
  auto process = rootrecon::Ctmc_process{rootrecon::two_state_chain(1.0)};
  auto rows = std::map<rootrecon::State, rootrecon::Distribution<rootrecon::State>>{};
  for (auto i = 0; i < 2; ++i) rows.emplace(i, *process.exact_row(i, 1.0));
  auto test = rootrecon::Frequency_test<rootrecon::State>{{0, 1}, rows};
  auto plan = rootrecon::plan_stretch(tree, 0.05, 1.0);
  auto rng = rootrecon::Rng{3};
  auto observed = rootrecon::simulate(tree, process, 0, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rootrecon::frequency_estimate(plan, test, process, observed, rng));
  }
}
BENCHMARK(bm_frequency_estimate)->Arg(50)->Arg(200);

void bm_map_exact(benchmark::State& state) {
  auto tree = rootrecon::generate_family(rootrecon::Family_kind::star, {.k = static_cast<int>(state.range(0))}).back();
  auto q = rootrecon::uniform_chain(3, 0.5);
  auto conditionals = std::map<rootrecon::State, rootrecon::Leaf_law>{};
  for (auto i = 0; i < 3; ++i) conditionals.emplace(i, rootrecon::exact_leaf_law(tree, q, i));
  auto prior = rootrecon::Distribution<rootrecon::State>{{{0, 0.5}, {1, 0.25}, {2, 0.25}}};
  auto process = rootrecon::Ctmc_process{q};
  auto rng = rootrecon::Rng{4};
  auto observed = rootrecon::to_leaf_tuple(tree, rootrecon::simulate(tree, process, 1, rng));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rootrecon::map_estimate(conditionals, prior, observed));
  }
}
BENCHMARK(bm_map_exact)->Arg(4)->Arg(8);

}  // namespace
