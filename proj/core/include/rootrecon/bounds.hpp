#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iterator>
#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

#include "rootrecon/distribution.hpp"
#include "rootrecon/rng.hpp"

namespace rootrecon {

// A bound together with how it was obtained. `value` is what callers compare
// against: min(raw, 1), or exactly 1 when the validity condition fails.
struct Bound_value {
  double value = 1.0;
  double raw = 1.0;
  bool clamped = false;       // raw exceeded 1
  bool condition_ok = true;   // the side condition under which the formula holds
};

// Quantities shared by the explicit error bounds for the frequency estimators.
struct Bound_inputs {
  double epsilon = 0.0;
  std::size_t n_epsilon = 1;
  double delta_epsilon = 0.0;   // min pairwise TV of the time-h* rows over the candidate set
  double q_star_epsilon = 1.0;  // max over candidates of (q_i v 1)
  double s = 0.0;
  std::size_t m = 1;            // boundary size of the truncation at s
  double f_star = 1.0;          // exp(-q* h*)
  double delta_q_hstar = 0.0;   // min pairwise TV over all states at h*
};

// 1 - sup_{i1 != i2} (prior(i1) ^ prior(i2)) (1 - TV(L^{i1}, L^{i2})).
template <typename S, typename Y>
auto recon_upper(const Distribution<S>& prior, const std::map<S, Distribution<Y>>& conditionals) -> double {
  if (prior.support_size() < 2) {
    throw std::invalid_argument("reconstruction upper bound needs at least two prior states");
  }
  auto worst = 0.0;
  for (auto a = prior.begin(); a != prior.end(); ++a) {
    for (auto b = std::next(a); b != prior.end(); ++b) {
      auto tv = total_variation(conditionals.at(a->first), conditionals.at(b->first));
      worst = std::max(worst, std::min(a->second, b->second) * (1.0 - tv));
    }
  }
  return 1.0 - worst;
}

// sum_{i in L} prior(i) - sum_{ordered i1 != i2 in L} (prior(i1) v prior(i2)) (1 - TV).
template <typename S, typename Y>
auto recon_lower(const Distribution<S>& prior, const std::map<S, Distribution<Y>>& conditionals,
                 const std::set<S>& candidates) -> double {
  if (candidates.empty()) {
    throw std::invalid_argument("reconstruction lower bound needs a nonempty candidate set");
  }
  auto total = 0.0;
  for (const auto& i : candidates) total += prior(i);
  auto penalty = 0.0;
  for (auto a = candidates.begin(); a != candidates.end(); ++a) {
    for (auto b = std::next(a); b != candidates.end(); ++b) {
      auto tv = total_variation(conditionals.at(*a), conditionals.at(*b));
      penalty += 2.0 * std::max(prior(*a), prior(*b)) * (1.0 - tv);
    }
  }
  return total - penalty;
}

// m/4 + 2 (q_i v 1) spread m^2.
auto variance_bound(std::size_t leaf_count, double spread, double q_i) -> double;

// 4/Delta*^2 [1/(4m) + 2 (q_i v 1) s], clamped to 1.
auto chebyshev_star_bound(double delta_star, std::size_t m, double q_i, double s) -> Bound_value;

// With d = Delta_eps/8: eps + (1 - e^{-q s})/d^2 + n_eps exp(-2 d^2 m/(1+d)),
// valid when 1 - e^{-q s} <= Delta_eps/4.
auto thm2_general_bound(const Bound_inputs& inp) -> Bound_value;

// With g = f_* ^ Delta_Q and d = g/8: (1 - e^{-q s})/d^2 + 11/f_* exp(-g^2 m/64),
// valid when 1 - e^{-q s} <= g/4.
auto prop54_uniform_bound(const Bound_inputs& inp) -> Bound_value;

inline constexpr double wilson_z99 = 2.5758293035489004;

struct Error_estimate {
  std::size_t errors = 0;
  std::size_t trials = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double std_error = 0.0;  // sqrt(rate (1 - rate) / trials)
};

auto wilson_interval(std::size_t errors, std::size_t trials, double z = wilson_z99) -> Error_estimate;

// Runs `trials` independent trials, each with its own stream derived from `master_seed`
// and the trial index; `is_error` reports a failed reconstruction. The result does not
// depend on `threads`.
auto monte_carlo_error(std::size_t trials, std::uint64_t master_seed, std::size_t threads,
                       const std::function<bool(std::size_t, Rng&)>& is_error) -> Error_estimate;

}  // namespace rootrecon
