#include "rootrecon/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <functional>
#include <map>
#include <memory>
#include <ostream>
#include <set>
#include <sstream>

#include "rootrecon/errors.hpp"
#include "rootrecon/estimators.hpp"
#include "rootrecon/newick.hpp"
#include "rootrecon/parallel.hpp"
#include "rootrecon/tkf91.hpp"
#include "rootrecon/treechain.hpp"

namespace rootrecon {

namespace {

constexpr auto nan = std::numeric_limits<double>::quiet_NaN();

auto format_double(double x) -> std::string {
  if (std::isnan(x)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

auto trivial_bound() -> Bound_value { return Bound_value{1.0, nan, false, true}; }

auto uniform_prior(std::size_t n) -> Distribution<State> {
  auto masses = Distribution<State>::Map{};
  for (auto i = std::size_t{0}; i < n; ++i) masses.emplace(static_cast<State>(i), 1.0 / static_cast<double>(n));
  return Distribution<State>{std::move(masses)};
}

auto exact_rows(const Rate_matrix& q, double h_star) -> std::map<State, Distribution<State>> {
  auto p = transition_matrix(q, h_star);
  auto rows = std::map<State, Distribution<State>>{};
  for (auto i = std::size_t{0}; i < q.size(); ++i) rows.emplace(static_cast<State>(i), p.row(static_cast<State>(i)));
  return rows;
}

// Per-k state shared read-only by all trials of one estimator kind.
struct Finite_setup {
  Bound_value bound;
  std::size_t m = 0;
  std::function<Estimator_report<State>(const Leaf_assignment<State>&, Rng&)> estimate;
};

auto finite_setup(const Experiment_config& config, const Tree& tree, const Rate_matrix& q,
                  const Ctmc_process& process, Row_cache<State>& cache) -> Finite_setup {
  auto n = q.size();
  auto prior = uniform_prior(n);
  auto setup = Finite_setup{};
  switch (config.estimator) {
    case Estimator_kind::map: {
      auto laws = std::map<State, Leaf_law>{};
      for (auto i = std::size_t{0}; i < n; ++i) {
        laws.emplace(static_cast<State>(i), exact_leaf_law(tree, q, static_cast<State>(i)));
      }
      auto all = std::set<State>{};
      for (auto i = std::size_t{0}; i < n; ++i) all.insert(static_cast<State>(i));
      auto raw = 1.0 - recon_lower(prior, laws, all);
      setup.bound = Bound_value{std::clamp(raw, 0.0, 1.0), raw, raw > 1.0, true};
      setup.m = tree.leaf_count();
      setup.estimate = [&tree, prior, laws = std::move(laws)](const Leaf_assignment<State>& leaves, Rng&) {
        auto report = Estimator_report<State>{};
        report.estimate = map_estimate(laws, prior, to_leaf_tuple(tree, leaves));
        return report;
      };
      break;
    }
    case Estimator_kind::frequency: {
      auto candidates = high_mass_states(prior, config.epsilon);
      auto rows = exact_rows(q, config.h_star);
      auto test = std::make_shared<Frequency_test<State>>(candidates, rows);
      auto plan = std::make_shared<Stretch_plan>(plan_stretch(tree, config.s, config.h_star));
      auto inp = Bound_inputs{};
      inp.epsilon = config.epsilon;
      inp.n_epsilon = candidates.size();
      inp.delta_epsilon = std::min(1.0, test->delta());
      inp.q_star_epsilon = 1.0;
      for (auto i : candidates) inp.q_star_epsilon = std::max(inp.q_star_epsilon, q.exit_rate(i));
      inp.s = config.s;
      inp.m = plan->info.m;
      setup.bound = thm2_general_bound(inp);
      setup.m = plan->info.m;
      setup.estimate = [&process, test, plan](const Leaf_assignment<State>& leaves, Rng& rng) {
        return frequency_estimate(*plan, *test, process, leaves, rng);
      };
      break;
    }
    case Estimator_kind::uniform: {
      auto plan = std::make_shared<Stretch_plan>(plan_stretch(tree, config.s, config.h_star));
      auto all = std::vector<State>{};
      for (auto i = std::size_t{0}; i < n; ++i) all.push_back(static_cast<State>(i));
      auto inp = Bound_inputs{};
      inp.q_star_epsilon = q.q_star();
      inp.s = config.s;
      inp.m = plan->info.m;
      inp.f_star = f_star(q.q_star(), config.h_star);
      inp.delta_q_hstar = identifiability_margin(q, config.h_star, all);
      setup.bound = prop54_uniform_bound(inp);
      setup.m = plan->info.m;
      auto q_star = q.q_star();
      setup.estimate = [&process, &cache, plan, q_star](const Leaf_assignment<State>& leaves, Rng& rng) {
        return uniform_chain_estimate(*plan, process, leaves, q_star, cache, rng);
      };
      break;
    }
    case Estimator_kind::majority: {
      if (n != 2) throw Config_error("key 'estimator.kind': majority needs a two-state chain");
      setup.bound = trivial_bound();
      setup.m = tree.leaf_count();
      setup.estimate = [](const Leaf_assignment<State>& leaves, Rng&) {
        auto report = Estimator_report<State>{};
        report.estimate = majority_estimate(leaves);
        return report;
      };
      break;
    }
  }
  return setup;
}

auto run_finite(const Experiment_config& config, std::size_t threads)
    -> Experiment_result {
  auto q = build_rate_matrix(config);
  auto process = Ctmc_process{q};
  auto n = q.size();
  if (config.fixed_root && (*config.fixed_root < 0 || static_cast<std::size_t>(*config.fixed_root) >= n)) {
    throw Config_error("key 'root': state out of range");
  }
  auto cache = Row_cache<State>{[&](const State& i) { return transition_matrix(q, config.h_star).row(i); }};
  auto hash = config_hash(config);
  auto result = Experiment_result{};
  for (auto k : config.effective_k_values()) {
    auto tree = experiment_tree(config, k);
    auto setup = finite_setup(config, tree, q, process, cache);
    auto records = std::vector<Trial_record>(config.trials);
    auto outcome = std::vector<char>(config.trials, 0);
    parallel_for(config.trials, threads, [&](std::size_t t) {
      auto trial = derive_seed(config.seed, k, t);
      auto root_rng = Rng::for_trial(trial, streams::root, 0);
      auto chain_rng = Rng::for_trial(trial, streams::tree_chain, 0);
      auto estimator_rng = Rng::for_trial(trial, streams::estimator, 0);
      auto root = config.fixed_root ? *config.fixed_root : static_cast<State>(root_rng.index(n));
      auto leaves = simulate<State>(tree, process, root, chain_rng);
      auto report = setup.estimate(leaves, estimator_rng);
      auto& r = records[t];
      r.k = k;
      r.trial = t;
      r.true_root = std::to_string(root);
      r.estimate = std::to_string(report.estimate);
      r.fallback = report.fallback;
      r.margin = report.margin;
      outcome[t] = report.estimate == root ? 0 : 1;
    });
    auto summary = Summary_record{};
    summary.config_hash = hash;
    summary.k = k;
    summary.leaves = tree.leaf_count();
    summary.m = setup.m;
    summary.s = config.s;
    summary.bound = setup.bound;
    summary.error = wilson_interval(static_cast<std::size_t>(std::count(outcome.begin(), outcome.end(), 1)),
                                    config.trials);
    summary.within_bound = empirical_within_bound(summary.error, summary.bound);
    summary.fallbacks = static_cast<std::size_t>(
        std::count_if(records.begin(), records.end(), [](const Trial_record& r) { return r.fallback; }));
    result.summary.push_back(summary);
    std::move(records.begin(), records.end(), std::back_inserter(result.trials));
  }
  return result;
}

auto run_tkf91(const Experiment_config& config, std::size_t threads)
    -> Experiment_result {
  auto settings = Tkf91_experiment_settings{};
  settings.s = config.s;
  settings.h_star = config.h_star;
  settings.epsilon = config.epsilon;
  settings.trials = config.trials;
  settings.row_samples = config.row_samples;
  settings.seed = config.seed;
  settings.threads = threads;
  auto trees = Indexed_trees{};
  for (auto k : config.effective_k_values()) trees.emplace_back(k, experiment_tree(config, k));
  auto rows = tkf91_root_experiment(trees, config.tkf91, settings);
  auto hash = config_hash(config);
  auto result = Experiment_result{};
  for (const auto& row : rows) {
    auto summary = Summary_record{};
    summary.config_hash = hash;
    summary.k = row.k;
    summary.leaves = row.leaves;
    summary.m = row.m;
    summary.s = config.s;
    summary.bound = trivial_bound();
    summary.error = row.error;
    summary.within_bound = true;
    summary.fallbacks = row.fallbacks;
    result.summary.push_back(summary);
  }
  return result;
}

}  // namespace

auto build_family(const Experiment_config& config) -> Nested_family {
  auto family = config.family_kind ? generate_family(*config.family_kind, config.family, config.family_seed)
                                   : read_family_file(config.family_file);
  if (auto bad = find_nesting_violation(family)) {
    throw Config_error("family: not nested at k = " + std::to_string(*bad + 1));
  }
  return family;
}

auto experiment_tree(const Experiment_config& config, std::size_t k) -> Tree {
  if (k < 1) throw Config_error("key 'experiment.k': entries must be at least 1");
  if (config.family_kind) {
    auto params = config.family;
    params.k = static_cast<int>(k);
    return generate_family(*config.family_kind, params, config.family_seed).back();
  }
  auto family = build_family(config);
  if (k > family.size()) {
    throw Config_error("key 'experiment.k': " + std::to_string(k) + " exceeds the family size " +
                       std::to_string(family.size()));
  }
  return family[k - 1];
}

auto build_rate_matrix(const Experiment_config& config) -> Rate_matrix {
  switch (config.process) {
    case Process_kind::two_state: return two_state_chain(config.q);
    case Process_kind::uniform: return uniform_chain(config.states, config.rate);
    case Process_kind::matrix: return read_rate_matrix_file(config.matrix_file);
    case Process_kind::tkf91: break;
  }
  throw Config_error("key 'process.kind': tkf91 has no finite rate matrix");
}

auto empirical_within_bound(const Error_estimate& error, const Bound_value& bound) -> bool {
  return bound.value >= 1.0 || error.rate <= bound.value + 3.0 * error.std_error;
}

auto run_experiment(const Experiment_config& config) -> Experiment_result {
  if (!(config.s > 0.0)) throw Config_error("key 'estimator.s': s must be > 0");
  auto threads = config.threads == 0 ? default_thread_count() : config.threads;
  if (config.process == Process_kind::tkf91) {
    if (config.estimator != Estimator_kind::frequency) {
      throw Config_error("key 'estimator.kind': only the frequency estimator supports tkf91");
    }
    try {
      config.tkf91.validate();
    } catch (const std::invalid_argument& e) {
      throw Config_error(std::string{"key 'tkf91': "} + e.what());
    }
    return run_tkf91(config, threads);
  }
  return run_finite(config, threads);
}

void write_trials_csv(std::ostream& os, const Experiment_result& result) {
  os << "k,trial,true_root,estimate,fallback,margin\n";
  for (const auto& r : result.trials) {
    os << r.k << ',' << r.trial << ',' << r.true_root << ',' << r.estimate << ',' << (r.fallback ? 1 : 0) << ','
       << format_double(r.margin) << '\n';
  }
}

void write_summary_csv(std::ostream& os, const Experiment_result& result) {
  os << "config_hash,k,leaves,m,s,bound,bound_raw,bound_valid,empirical,ci_low,ci_high,within_bound,fallbacks\n";
  for (const auto& r : result.summary) {
    os << r.config_hash << ',' << r.k << ',' << r.leaves << ',' << r.m << ',' << format_double(r.s) << ','
       << format_double(r.bound.value) << ',' << format_double(r.bound.raw) << ',' << (r.bound.condition_ok ? 1 : 0)
       << ',' << format_double(r.error.rate) << ',' << format_double(r.error.ci_low) << ','
       << format_double(r.error.ci_high) << ',' << (r.within_bound ? 1 : 0) << ',' << r.fallbacks << '\n';
  }
}

void write_experiment_files(const std::string& prefix, const Experiment_result& result) {
  auto write = [](const std::string& path, auto&& body) {
    auto out = std::ofstream{path, std::ios::binary};
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    body(out);
  };
  write(prefix + ".trials.csv", [&](std::ostream& os) { write_trials_csv(os, result); });
  write(prefix + ".summary.csv", [&](std::ostream& os) { write_summary_csv(os, result); });
}

}  // namespace rootrecon
