#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rootrecon/bounds.hpp"
#include "rootrecon/ctmc.hpp"
#include "rootrecon/distribution.hpp"
#include "rootrecon/rng.hpp"
#include "rootrecon/tree.hpp"

namespace rootrecon {

inline constexpr std::array<char, 4> nucleotides = {'A', 'C', 'G', 'T'};
inline constexpr std::size_t tkf91_length_cap = 10'000;

struct Tkf91_params {
  double nu = 1.0;      // substitution rate per site
  double lambda = 0.5;  // insertion rate per site, immortal link included
  double mu = 1.0;      // deletion rate per site
  std::array<double, 4> pi = {0.25, 0.25, 0.25, 0.25};  // indexed like `nucleotides`

  // Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
  auto ratio() const -> double { return lambda / mu; }
};

// The letters after the immortal link. Ordered by length, then lexicographically.
struct Tkf91_sequence {
  std::string letters;

  auto size() const -> std::size_t { return letters.size(); }
  auto operator==(const Tkf91_sequence&) const -> bool = default;
  auto operator<=>(const Tkf91_sequence& other) const -> std::strong_ordering {
    if (auto c = letters.size() <=> other.letters.size(); c != 0) return c;
    return letters <=> other.letters;
  }
};

auto operator<<(std::ostream& os, const Tkf91_sequence& seq) -> std::ostream&;

// Exact Gillespie simulation for time t. Throws Guard_violation if the length
// exceeds tkf91_length_cap.
auto tkf91_evolve(const Tkf91_params& params, Tkf91_sequence seq, double t, Rng& rng) -> Tkf91_sequence;

// Geometric length with success 1 - lambda/mu, then i.i.d. letters.
auto stationary_sample(const Tkf91_params& params, Rng& rng) -> Tkf91_sequence;

// (1 - lambda/mu) (lambda/mu)^M prod pi(x_i).
auto stationary_pmf(const Tkf91_params& params, const Tkf91_sequence& seq) -> double;

// P(M = length) under the stationary law.
auto stationary_length_pmf(const Tkf91_params& params, std::size_t length) -> double;

// Smallest set of highest-mass sequences whose remaining stationary mass is < epsilon,
// in decreasing mass order (ties by sequence order).
auto tkf91_lambda_epsilon(const Tkf91_params& params, double epsilon, std::size_t limit = 1'000'000)
    -> std::vector<Tkf91_sequence>;

class Tkf91_process final : public Generative_process<Tkf91_sequence> {
 public:
  explicit Tkf91_process(Tkf91_params params);

  auto sample(const Tkf91_sequence& start, double t, Rng& rng) const -> Tkf91_sequence override {
    return tkf91_evolve(params_, start, t, rng);
  }
  auto params() const -> const Tkf91_params& { return params_; }

 private:
  Tkf91_params params_;
};

struct Tkf91_experiment_settings {
  double s = 0.05;
  double h_star = 1.0;
  double epsilon = 0.3;
  std::size_t trials = 2000;
  std::size_t row_samples = 100'000;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
};

struct Tkf91_experiment_row {
  std::size_t k = 0;
  std::size_t leaves = 0;
  std::size_t m = 0;
  std::size_t candidates = 0;
  double delta = 0.0;  // min pairwise TV of the plug-in rows
  Error_estimate error;
  std::size_t fallbacks = 0;
};

// One tree per family parameter k.
using Indexed_trees = std::vector<std::pair<std::size_t, Tree>>;

// Root drawn from the stationary law, leaves simulated on each tree, reconstruction by
// the frequency test over the high-mass set with Monte Carlo plug-in rows. Rows are
// estimated once and shared across trees.
auto tkf91_root_experiment(const Indexed_trees& trees, const Tkf91_params& params,
                           const Tkf91_experiment_settings& settings) -> std::vector<Tkf91_experiment_row>;

void write_tkf91_csv(std::ostream& os, const std::vector<Tkf91_experiment_row>& rows);

}  // namespace rootrecon
