#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rootrecon/families.hpp"
#include "rootrecon/tkf91.hpp"

namespace rootrecon {

enum class Process_kind { two_state, uniform, matrix, tkf91 };
enum class Estimator_kind { map, frequency, uniform, majority };

auto parse_process_kind(std::string_view name) -> Process_kind;
auto parse_estimator_kind(std::string_view name) -> Estimator_kind;
auto to_string(Process_kind kind) -> std::string;
auto to_string(Estimator_kind kind) -> std::string;

// A parsed experiment configuration. The text form is `key = value` lines with `#`
// comments; see README for the key list.
struct Experiment_config {
  // Family: either generated (kind + params) or read from a file of Newick lines.
  std::optional<Family_kind> family_kind = Family_kind::figure1;
  std::string family_file;
  Family_params family;
  std::uint64_t family_seed = 0;
  std::vector<std::size_t> k_values;  // 1-based indices into the family; empty means {family.k}

  Process_kind process = Process_kind::two_state;
  double q = 1.0;              // two_state: both off-diagonal rates
  std::size_t states = 4;      // uniform: state count
  double rate = 1.0 / 3.0;     // uniform: every off-diagonal rate
  std::string matrix_file;     // matrix
  Tkf91_params tkf91;

  Estimator_kind estimator = Estimator_kind::frequency;
  double epsilon = 0.01;
  double s = 0.05;
  double h_star = 1.0;
  std::size_t row_samples = 100'000;

  std::optional<int> fixed_root;  // unset: root drawn from the uniform prior
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::size_t threads = 0;  // 0: default_thread_count()
  std::string output;       // path prefix for CSV files; empty writes the summary to stdout

  auto effective_k_values() const -> std::vector<std::size_t>;
};

// Throws Config_error whose message names the offending key.
auto parse_config(std::string_view text) -> Experiment_config;
auto load_config(const std::string& path) -> Experiment_config;

// Canonical text of every setting that affects results (threads and output excluded).
auto canonical_text(const Experiment_config& config) -> std::string;

// 64-bit FNV-1a of canonical_text, as 16 hex digits.
auto config_hash(const Experiment_config& config) -> std::string;

// Every violated invariant, without running anything. Empty when valid.
auto validate(const Experiment_config& config) -> std::vector<std::string>;

}  // namespace rootrecon
