#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rootrecon/distribution.hpp"
#include "rootrecon/rng.hpp"

namespace rootrecon {

using State = int;

// Stable, conservative rate matrix over states 0..n-1.
class Rate_matrix {
 public:
  // Row-major n*n entries. Off-diagonals must be >= 0 and each row must sum to 0
  // (relative tolerance 1e-9).
  Rate_matrix(std::size_t n, std::vector<double> entries);

  // Diagonal filled in from the off-diagonal entries (given diagonal is ignored).
  static auto from_off_diagonal(std::size_t n, std::vector<double> entries) -> Rate_matrix;

  auto size() const -> std::size_t { return n_; }
  auto rate(State i, State j) const -> double { return q_[static_cast<std::size_t>(i) * n_ + j]; }
  // q_i = -q_ii
  auto exit_rate(State i) const -> double { return -rate(i, i); }
  auto max_exit_rate() const -> double;
  // Operator norm sup_i sum_j |q_ij| = 2 max_i q_i.
  auto norm() const -> double;
  // max_i (q_i v 1)
  auto q_star() const -> double;
  auto entries() const -> std::span<const double> { return q_; }

 private:
  std::size_t n_;
  std::vector<double> q_;
};

auto two_state_chain(double q) -> Rate_matrix;
// Every off-diagonal rate equal to `rate` (Jukes-Cantor style when n = 4).
auto uniform_chain(std::size_t n, double rate) -> Rate_matrix;
// Whitespace-separated rows, one per line; '#' lines are comments.
auto parse_rate_matrix(const std::string& text) -> Rate_matrix;
auto read_rate_matrix_file(const std::string& path) -> Rate_matrix;

// Dense row-stochastic matrix.
class Transition_matrix {
 public:
  Transition_matrix(std::size_t n, std::vector<double> entries) : n_{n}, p_{std::move(entries)} {}

  auto size() const -> std::size_t { return n_; }
  auto operator()(State i, State j) const -> double { return p_[static_cast<std::size_t>(i) * n_ + j]; }
  auto row_values(State i) const -> std::span<const double> {
    return std::span<const double>{p_}.subspan(static_cast<std::size_t>(i) * n_, n_);
  }
  auto row(State i) const -> Distribution<State>;
  auto entries() const -> std::span<const double> { return p_; }

 private:
  std::size_t n_;
  std::vector<double> p_;
};

inline constexpr double default_uniformization_tolerance = 1e-12;

// exp(tQ) by uniformization: Poisson-weighted powers of I + Q/max_i q_i, truncated
// once the Poisson tail drops below tol. Large horizons are halved and squared back.
auto transition_matrix(const Rate_matrix& q, double t, double tol = default_uniformization_tolerance)
    -> Transition_matrix;

// Minimum total variation between rows of exp(tQ) over distinct pairs in `subset`;
// +infinity when the subset has fewer than two states.
auto identifiability_margin(const Rate_matrix& q, double t, std::span<const State> subset) -> double;

// Gillespie simulation of the chain for duration t.
auto sample_endpoint(const Rate_matrix& q, State start, double t, Rng& rng) -> State;

// sum_i 2^-i |v_i| with 1-based positions.
auto star_norm(std::span<const double> v) -> double;

// e^{-q_star h_star}
auto f_star(double q_star, double h_star) -> double;

// A Markov kernel that can be sampled; an exact row is optional.
template <typename S>
class Generative_process {
 public:
  virtual ~Generative_process() = default;
  virtual auto sample(const S& start, double t, Rng& rng) const -> S = 0;
  virtual auto exact_row(const S&, double) const -> std::optional<Distribution<S>> { return std::nullopt; }
};

class Ctmc_process final : public Generative_process<State> {
 public:
  explicit Ctmc_process(Rate_matrix q) : q_{std::move(q)} {}

  auto sample(const State& start, double t, Rng& rng) const -> State override {
    return sample_endpoint(q_, start, t, rng);
  }
  auto exact_row(const State& start, double t) const -> std::optional<Distribution<State>> override {
    return transition_matrix(q_, t).row(start);
  }
  auto rates() const -> const Rate_matrix& { return q_; }

 private:
  Rate_matrix q_;
};

}  // namespace rootrecon
