#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <string>

#include "oracles.hpp"
#include "rootrecon/bounds.hpp"
#include "rootrecon/errors.hpp"
#include "rootrecon/estimators.hpp"
#include "rootrecon/families.hpp"
#include "rootrecon/newick.hpp"

namespace rootrecon {
namespace {

using ::testing::ElementsAre;

auto uniform_prior(int n) -> Distribution<State> {
  auto m = Distribution<State>::Map{};
  for (auto i = 0; i < n; ++i) m[i] = 1.0 / n;
  return Distribution<State>{m};
}

auto random_rate_matrix(Rng& rng, std::size_t n) -> Rate_matrix {
  auto entries = std::vector<double>(n * n, 0.0);
  for (auto i = std::size_t{0}; i < n; ++i)
    for (auto j = std::size_t{0}; j < n; ++j)
      if (i != j) entries[i * n + j] = rng.uniform() * 2.0;
  return Rate_matrix::from_off_diagonal(n, entries);
}

auto laws_for(const Tree& tree, const Rate_matrix& q) -> std::map<State, Leaf_law> {
  auto laws = std::map<State, Leaf_law>{};
  for (auto i = 0; i < static_cast<int>(q.size()); ++i) laws.emplace(i, exact_leaf_law(tree, q, i));
  return laws;
}

auto all_tuples(std::size_t leaves, int states) -> std::vector<Leaf_tuple> {
  auto out = std::vector<Leaf_tuple>{Leaf_tuple{}};
  for (auto l = std::size_t{0}; l < leaves; ++l) {
    auto next = std::vector<Leaf_tuple>{};
    for (const auto& t : out) {
      for (auto s = 0; s < states; ++s) {
        next.push_back(t);
        next.back().push_back(s);
      }
    }
    out = std::move(next);
  }
  return out;
}

TEST(MapEstimate, PointMassPriorWins) {
  auto q = two_state_chain(1.0);
  auto tree = parse_newick("(a:1,b:1,c:1);");
  auto laws = laws_for(tree, q);
  auto prior = Distribution<State>::point_mass(1);
  EXPECT_EQ(map_estimate(laws, prior, Leaf_tuple{0, 0, 0}), 1);
}

TEST(MapEstimate, PinchedStarIsMajority) {
  auto tree = generate_family(Family_kind::pinched_star, {.k = 5, .height = 1.0, .pinch = 0.05}).back();
  auto laws = laws_for(tree, two_state_chain(1.0));
  for (const auto& tuple : all_tuples(5, 2)) {
    auto zeros = std::count(tuple.begin(), tuple.end(), 0);
    EXPECT_EQ(map_estimate(laws, uniform_prior(2), tuple), zeros > 2 ? 0 : 1);
  }
}

TEST(MapEstimate, EqualsBruteForceOptimum) {
  auto rng = Rng{21};
  auto tree = parse_newick("(a:0.4,b:0.9);");
  for (auto trial = 0; trial < 10; ++trial) {
    auto q = random_rate_matrix(rng, 3);
    auto laws = laws_for(tree, q);
    auto prior_values = std::vector<double>{0.2 + rng.uniform(), 0.2 + rng.uniform(), 0.2 + rng.uniform()};
    auto total = prior_values[0] + prior_values[1] + prior_values[2];
    auto masses = Distribution<State>::Map{};
    for (auto i = 0; i < 3; ++i) masses[i] = prior_values[i] /= total;
    auto prior = Distribution<State>{masses};
    auto tuples = all_tuples(2, 3);
    auto likelihood = oracle::Matrix(3, std::vector<double>(tuples.size()));
    auto rule = std::vector<std::size_t>{};
    for (auto y = std::size_t{0}; y < tuples.size(); ++y) {
      for (auto i = 0; i < 3; ++i) likelihood[i][y] = laws.at(i)(tuples[y]);
      rule.push_back(static_cast<std::size_t>(map_estimate(laws, prior, tuples[y])));
    }
    EXPECT_NEAR(oracle::success_probability(prior_values, likelihood, rule),
                oracle::brute_force_optimum(prior_values, likelihood), 1e-12);
  }
}

TEST(MapEstimate, TiesGoToSmallestLabel) {
  auto laws = std::map<State, Distribution<State>>{{0, Distribution<State>::point_mass(5)},
                                                   {1, Distribution<State>::point_mass(5)}};
  EXPECT_EQ(map_estimate(laws, uniform_prior(2), 5), 0);
}

TEST(MapEstimate, ImpossibleObservation) {
  auto laws = std::map<State, Distribution<State>>{{0, Distribution<State>::point_mass(5)},
                                                   {1, Distribution<State>::point_mass(6)}};
  EXPECT_THROW(map_estimate(laws, uniform_prior(2), 7), Impossible_observation);
}

TEST(RestrictedMap, FullSetEqualsMap) {
  auto rng = Rng{22};
  auto tree = parse_newick("(a:0.5,b:0.5);");
  auto laws = laws_for(tree, random_rate_matrix(rng, 3));
  auto all = std::set<State>{0, 1, 2};
  for (const auto& t : all_tuples(2, 3)) {
    EXPECT_EQ(restricted_map_estimate(laws, uniform_prior(3), t, all), map_estimate(laws, uniform_prior(3), t));
    EXPECT_EQ(restricted_map_estimate(laws, uniform_prior(3), t, std::set<State>{2}), 2);
  }
  EXPECT_THROW(restricted_map_estimate(laws, uniform_prior(3), Leaf_tuple{0, 0}, std::set<State>{}),
               std::invalid_argument);
}

TEST(RestrictedMap, SuccessAboveLowerBound) {
  auto rng = Rng{23};
  auto tree = parse_newick("(a:0.3,b:0.6);");
  for (auto trial = 0; trial < 20; ++trial) {
    auto q = random_rate_matrix(rng, 3);
    auto laws = laws_for(tree, q);
    auto prior = uniform_prior(3);
    auto tuples = all_tuples(2, 3);
    // Drop the state the full MAP picks most often.
    auto picks = std::map<State, int>{};
    for (const auto& t : tuples) ++picks[map_estimate(laws, prior, t)];
    auto top = std::max_element(picks.begin(), picks.end(), [](auto a, auto b) { return a.second < b.second; });
    auto candidates = std::set<State>{0, 1, 2};
    candidates.erase(top->first);
    auto success = 0.0;
    for (const auto& t : tuples) {
      auto f = restricted_map_estimate(laws, prior, t, candidates);
      success += prior(f) * laws.at(f)(t);
    }
    EXPECT_GE(success, recon_lower(prior, laws, candidates) - 1e-12);
  }
}

TEST(HighMassStates, SmallestPrefixWithSmallTail) {
  auto prior = Distribution<State>{{{0, 0.5}, {1, 0.3}, {2, 0.15}, {3, 0.05}}};
  EXPECT_THAT(high_mass_states(prior, 0.1), ElementsAre(0, 1, 2));
  EXPECT_THAT(high_mass_states(prior, 0.05), ElementsAre(0, 1, 2, 3));
  EXPECT_THAT(high_mass_states(prior, 0.6), ElementsAre(0));
  EXPECT_THROW(high_mass_states(prior, 0.0), std::invalid_argument);
}

TEST(FrequencyEstimate, SingletonRunsNoTests) {
  auto tree = parse_newick("(a:1,b:1,c:1);");
  auto process = Ctmc_process{two_state_chain(1.0)};
  auto rows = std::map<State, Distribution<State>>{{1, transition_matrix(two_state_chain(1.0), 1.0).row(1)}};
  auto rng = Rng{1};
  auto report = frequency_estimate<State>(tree, process, {{"a", 0}, {"b", 0}, {"c", 0}}, 0.1, 1.0, {1}, rows, rng);
  EXPECT_EQ(report.estimate, 1);
  EXPECT_FALSE(report.tests_run);
  EXPECT_FALSE(report.fallback);
}

TEST(FrequencyEstimate, PinchedStarBelowPinchIsSingleLeafTest) {
  auto tree = Tree{{{"r", no_vertex, 0.0}, {"v", 0, 0.5}, {"a", 1, 0.5}, {"b", 1, 0.5}, {"c", 1, 0.5}}};
  auto q = two_state_chain(1.0);
  auto process = Ctmc_process{q};
  auto p = transition_matrix(q, 1.0);
  auto rows = std::map<State, Distribution<State>>{{0, p.row(0)}, {1, p.row(1)}};
  auto rng = Rng{2};
  for (auto a = 0; a < 2; ++a) {
    auto report = frequency_estimate<State>(tree, process, {{"a", a}, {"b", 1 - a}, {"c", 1 - a}}, 0.2, 1.0,
                                            {0, 1}, rows, rng);
    EXPECT_EQ(report.restriction.m, 1u);
    EXPECT_EQ(report.estimate, a);  // only leaf "a" is consulted, and it is already at h*
    EXPECT_FALSE(report.fallback);
    EXPECT_NEAR(report.delta, std::exp(-2.0), 1e-12);
    EXPECT_NEAR(report.margin, 1.0 - (p(0, 0) - std::exp(-2.0) / 2.0), 1e-12);
  }
}

TEST(FrequencyEstimate, Errors) {
  auto tree = parse_newick("(a:1);");
  auto process = Ctmc_process{two_state_chain(1.0)};
  auto rows = std::map<State, Distribution<State>>{};
  auto rng = Rng{3};
  EXPECT_THROW(frequency_estimate<State>(tree, process, {{"a", 0}}, 0.1, 1.0, {}, rows, rng), std::invalid_argument);
  EXPECT_THROW(frequency_estimate<State>(tree, process, {{"a", 0}}, 0.1, 1.0, {0, 1}, rows, rng),
               std::invalid_argument);
}

TEST(FrequencyTest, AtMostOneStatePassesForAnyCounts) {
  auto rng = Rng{31};
  auto before = exclusivity_counters().violations.load();
  for (auto trial = 0; trial < 300; ++trial) {
    auto n = 2 + static_cast<int>(rng.index(4));
    auto q = random_rate_matrix(rng, static_cast<std::size_t>(n));
    auto p = transition_matrix(q, 0.2 + rng.uniform());
    auto rows = std::map<State, Distribution<State>>{};
    auto candidates = std::vector<State>{};
    for (auto i = 0; i < n; ++i) {
      rows.emplace(i, p.row(i));
      candidates.push_back(i);
    }
    auto test = Frequency_test<State>{candidates, rows};
    for (auto draw = 0; draw < 50; ++draw) {
      auto freq = Frequency_vector<State>{};
      auto m = 1 + rng.index(40);
      for (auto leaf = std::uint64_t{0}; leaf < m; ++leaf) {
        ++freq.counts[static_cast<State>(rng.index(static_cast<std::uint64_t>(n)))];
        ++freq.total;
      }
      auto report = test.decide(freq, rng);
      auto passing = std::count_if(report.margins.begin(), report.margins.end(), [](auto mm) { return mm.second > 0; });
      EXPECT_LE(passing, 1);
      EXPECT_EQ(report.fallback, passing == 0);
    }
  }
  EXPECT_EQ(exclusivity_counters().violations.load(), before);
}

TEST(UniformChainEstimate, ZeroRatesReturnRoot) {
  auto tree = generate_family(Family_kind::figure1, {.k = 20}).back();
  auto q = uniform_chain(4, 0.0);
  auto process = Ctmc_process{q};
  auto cache = Row_cache<State>{[&](const State& i) { return transition_matrix(q, 1.0).row(i); }};
  auto rng = Rng{4};
  auto leaves = simulate<State>(tree, process, 2, rng);
  auto report = uniform_chain_estimate<State>(tree, process, leaves, 0.05, 1.0, 1.0, cache, rng);
  EXPECT_EQ(report.estimate, 2);
  EXPECT_EQ(report.candidates, 1u);
}

TEST(UniformChainEstimate, CandidateThresholdIsHalfFStar) {
  EXPECT_NEAR(f_star(1.0, 1.0) / 2.0, 0.18394, 1e-5);
  auto tree = generate_family(Family_kind::star, {.k = 100}).back();
  auto q = two_state_chain(1.0);
  auto process = Ctmc_process{q};
  auto cache = Row_cache<State>{[&](const State& i) { return transition_matrix(q, 1.0).row(i); }};
  auto rng = Rng{5};
  auto names = tree.leaf_names();
  auto observe = [&](int ones) {
    auto leaves = Leaf_assignment<State>{};
    for (auto i = 0; i < 100; ++i) leaves[names[i]] = i < ones ? 1 : 0;
    return uniform_chain_estimate<State>(tree, process, leaves, 0.5, 1.0, 1.0, cache, rng);
  };
  auto below = observe(18);
  EXPECT_EQ(below.candidates, 1u);
  EXPECT_EQ(below.estimate, 0);
  EXPECT_EQ(observe(19).candidates, 2u);
}

TEST(MajorityEstimate, Examples) {
  auto leaves = Leaf_assignment<State>{};
  for (auto i = 0; i < 101; ++i) leaves[leaf_label("x", i, 101)] = 1;
  EXPECT_EQ(majority_estimate(leaves), 1);
  for (auto i = 0; i < 50; ++i) leaves[leaf_label("x", i, 101)] = 0;
  EXPECT_EQ(majority_estimate(leaves), 1);  // 51 of 101 in state 1
  leaves.erase(leaf_label("x", 0, 101));
  EXPECT_THROW(majority_estimate(leaves), std::invalid_argument);
}

TEST(MajorityEstimate, ExactErrorMatchesBinomialSum) {
  auto tree = generate_family(Family_kind::pinched_star, {.k = 3, .height = 1.0, .pinch = 0.05}).back();
  auto law = exact_leaf_law(tree, two_state_chain(1.0), 0);
  auto names = tree.leaf_names();
  auto error = 0.0;
  for (const auto& [tuple, p] : law) {
    auto leaves = Leaf_assignment<State>{};
    for (auto i = std::size_t{0}; i < tuple.size(); ++i) leaves[names[i]] = tuple[i];
    if (majority_estimate(leaves) != 0) error += p;
  }
  EXPECT_NEAR(error, oracle::pinched_star_majority_error(3, 1.0, 0.05, 1.0), 1e-12);
}

TEST(MonteCarloRow, ApproximatesExactRow) {
  auto q = two_state_chain(1.0);
  auto process = Ctmc_process{q};
  auto rng = Rng{6};
  auto row = monte_carlo_row<State>(process, 0, 1.0, 100000, rng);
  EXPECT_LE(total_variation(row, transition_matrix(q, 1.0).row(0)), 0.01);
  EXPECT_THROW(monte_carlo_row<State>(process, 0, 1.0, 0, rng), std::invalid_argument);
}

}  // namespace
}  // namespace rootrecon
