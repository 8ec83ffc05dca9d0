#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "rootrecon/bounds.hpp"
#include "rootrecon/config.hpp"
#include "rootrecon/ctmc.hpp"
#include "rootrecon/tree.hpp"

namespace rootrecon {

struct Trial_record {
  std::size_t k = 0;
  std::size_t trial = 0;
  std::string true_root;
  std::string estimate;
  bool fallback = false;
  double margin = 0.0;  // NaN when the estimator runs no threshold tests
};

struct Summary_record {
  std::string config_hash;
  std::size_t k = 0;
  std::size_t leaves = 0;
  std::size_t m = 0;
  double s = 0.0;
  Bound_value bound;  // upper bound on the error probability
  Error_estimate error;
  bool within_bound = true;
  std::size_t fallbacks = 0;
};

struct Experiment_result {
  std::vector<Summary_record> summary;
  std::vector<Trial_record> trials;  // ordered by (k, trial)
};

auto build_family(const Experiment_config& config) -> Nested_family;

// The tree an experiment runs on for parameter k: the last member of the generated
// family with that k, or the k-th (1-based) tree of a family file.
auto experiment_tree(const Experiment_config& config, std::size_t k) -> Tree;

// The finite-state rate matrix named by the config; throws Config_error for tkf91.
auto build_rate_matrix(const Experiment_config& config) -> Rate_matrix;

// True when the bound is vacuous or the empirical rate is within 3 standard errors of it.
auto empirical_within_bound(const Error_estimate& error, const Bound_value& bound) -> bool;

// Runs every requested k. Results depend only on the config, never on thread count.
auto run_experiment(const Experiment_config& config) -> Experiment_result;

// Columns: k,trial,true_root,estimate,fallback,margin
void write_trials_csv(std::ostream& os, const Experiment_result& result);

// Columns: config_hash,k,leaves,m,s,bound,bound_raw,bound_valid,empirical,ci_low,ci_high,within_bound,fallbacks
void write_summary_csv(std::ostream& os, const Experiment_result& result);

// Writes <output>.trials.csv and <output>.summary.csv.
void write_experiment_files(const std::string& prefix, const Experiment_result& result);

}  // namespace rootrecon
