#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rootrecon/ctmc.hpp"
#include "rootrecon/distribution.hpp"
#include "rootrecon/errors.hpp"
#include "rootrecon/rng.hpp"
#include "rootrecon/tree.hpp"
#include "rootrecon/treechain.hpp"

namespace rootrecon {

// ---------------------------------------------------------------------------
// Maximum a posteriori

namespace detail {

template <typename S, typename Y>
auto posterior_argmax(const std::map<S, Distribution<Y>>& conditionals, const Distribution<S>& prior,
                      const Y& observed, const std::set<S>* allowed) -> S {
  auto feasible = false;
  for (const auto& [state, p] : prior) {
    auto it = conditionals.find(state);
    if (it == conditionals.end()) {
      throw std::invalid_argument("no conditional law for a state in the prior support");
    }
    feasible = feasible || it->second(observed) > 0.0;
  }
  if (!feasible) {
    throw Impossible_observation("impossible observation: zero mass under every root state");
  }
  // Ties go to the smallest label: only a strictly larger posterior replaces the incumbent.
  auto best = std::optional<S>{};
  auto best_mass = -1.0;
  auto consider = [&](const S& state) {
    auto it = conditionals.find(state);
    auto mass = it == conditionals.end() ? 0.0 : prior(state) * it->second(observed);
    if (mass > best_mass) {
      best = state;
      best_mass = mass;
    }
  };
  if (allowed != nullptr) {
    for (const auto& state : *allowed) consider(state);
  } else {
    for (const auto& [state, law] : conditionals) consider(state);
  }
  return *best;
}

}  // namespace detail

// argmax_i prior(i) * L^i(observed); ties broken by the smallest state.
template <typename S, typename Y>
auto map_estimate(const std::map<S, Distribution<Y>>& conditionals, const Distribution<S>& prior, const Y& observed)
    -> S {
  return detail::posterior_argmax(conditionals, prior, observed, static_cast<const std::set<S>*>(nullptr));
}

// Same argmax with candidates limited to `allowed`.
template <typename S, typename Y>
auto restricted_map_estimate(const std::map<S, Distribution<Y>>& conditionals, const Distribution<S>& prior,
                             const Y& observed, const std::set<S>& allowed) -> S {
  if (allowed.empty()) {
    throw std::invalid_argument("restricted MAP needs a nonempty candidate set");
  }
  return detail::posterior_argmax(conditionals, prior, observed, &allowed);
}

// Smallest label-ordered prefix of the prior support whose remaining mass is < epsilon.
template <typename S>
auto high_mass_states(const Distribution<S>& prior, double epsilon) -> std::vector<S> {
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("epsilon must be positive");
  }
  auto states = std::vector<S>{};
  auto masses = std::vector<double>{};
  for (const auto& [state, p] : prior) {
    states.push_back(state);
    masses.push_back(p);
  }
  // Suffix sums keep the tail accurate when it is tiny.
  auto tail = std::vector<double>(masses.size() + 1, 0.0);
  for (auto i = masses.size(); i-- > 0;) {
    tail[i] = tail[i + 1] + masses[i];
  }
  auto n = std::size_t{1};
  while (n < states.size() && !(tail[n] < epsilon)) {
    ++n;
  }
  states.resize(n);
  return states;
}

// ---------------------------------------------------------------------------
// Frequencies on the stretched well-spread restriction

template <typename S>
struct Frequency_vector {
  std::map<S, std::size_t> counts;
  std::size_t total = 0;

  auto count(const S& state) const -> std::size_t {
    auto it = counts.find(state);
    return it == counts.end() ? 0 : it->second;
  }
  auto count(const Event<S>& event) const -> std::size_t {
    auto n = std::size_t{0};
    for (const auto& [state, c] : counts) {
      if (event.contains(state)) n += c;
    }
    return n;
  }
};

struct Restriction_info {
  double s = 0.0;
  double h_star = 0.0;
  std::size_t m = 0;    // leaves of the restriction = |boundary of T(s)|
  double spread = 0.0;  // 0 when m < 2
};

// Which observed leaves feed the estimator, and how far each must be extended.
struct Stretch_plan {
  std::vector<std::string> leaves;
  std::vector<double> extension;
  Restriction_info info;
};

auto plan_stretch(const Tree& tree, double s, double h_star) -> Stretch_plan;

template <typename S>
struct Stretched_sample {
  Frequency_vector<S> frequencies;
  Restriction_info info;
};

// Runs the process from each chosen leaf's observed state for its extension time,
// then tallies the resulting states.
template <typename S>
auto stretch_observation(const Stretch_plan& plan, const Generative_process<S>& process,
                         const Leaf_assignment<S>& observed, Rng& rng) -> Stretched_sample<S> {
  auto out = Stretched_sample<S>{{}, plan.info};
  for (auto k = std::size_t{0}; k < plan.leaves.size(); ++k) {
    auto it = observed.find(plan.leaves[k]);
    if (it == observed.end()) {
      throw std::invalid_argument("observation is missing leaf '" + plan.leaves[k] + "'");
    }
    auto state = plan.extension[k] > 0.0 ? process.sample(it->second, plan.extension[k], rng) : it->second;
    ++out.frequencies.counts[state];
    ++out.frequencies.total;
  }
  return out;
}

template <typename S>
struct Estimator_report {
  S estimate{};
  bool fallback = false;     // chosen uniformly at random because no state passed
  bool tests_run = false;    // false when the candidate set was a singleton
  double delta = 0.0;        // min pairwise TV of the candidate rows
  double margin = std::numeric_limits<double>::quiet_NaN();  // min_i' (N_A/m - threshold) for the estimate
  std::vector<std::pair<S, double>> margins;                   // same, per candidate
  std::size_t candidates = 0;
  Restriction_info restriction;
};

struct Exclusivity_counters {
  std::atomic<std::size_t> invocations{0};
  std::atomic<std::size_t> violations{0};
};

// Process-wide tally of frequency-test decisions; read by the acceptance suite.
auto exclusivity_counters() -> Exclusivity_counters&;

// The threshold test: state i passes when N_{A(i->i')}/m > p_{i,A(i->i')} - delta/2
// for every other candidate i'. Precomputes delta and the TV-achieving events.
template <typename S>
class Frequency_test {
 public:
  Frequency_test(std::vector<S> candidates, const std::map<S, Distribution<S>>& rows)
      : candidates_{std::move(candidates)} {
    if (candidates_.empty()) {
      throw std::invalid_argument("frequency estimator needs a nonempty candidate set");
    }
    std::ranges::sort(candidates_);
    candidates_.erase(std::unique(candidates_.begin(), candidates_.end()), candidates_.end());
    auto k = candidates_.size();
    if (k == 1) {
      return;
    }
    auto row = [&](const S& s) -> const Distribution<S>& {
      auto it = rows.find(s);
      if (it == rows.end()) {
        throw std::invalid_argument("missing transition row for a candidate state");
      }
      return it->second;
    };
    delta_ = std::numeric_limits<double>::infinity();
    for (auto a = std::size_t{0}; a < k; ++a) {
      for (auto b = a + 1; b < k; ++b) {
        delta_ = std::min(delta_, total_variation(row(candidates_[a]), row(candidates_[b])));
      }
    }
    tests_.assign(k, std::vector<Test>(k));
    for (auto a = std::size_t{0}; a < k; ++a) {
      for (auto b = std::size_t{0}; b < k; ++b) {
        if (a == b) continue;
        const auto& ra = row(candidates_[a]);
        auto event = tv_achieving_set(ra, row(candidates_[b]), candidates_[a], candidates_[b]);
        auto p = event.probability(ra);
        tests_[a][b] = Test{std::move(event), p - 0.5 * delta_};
      }
    }
  }

  auto candidates() const -> const std::vector<S>& { return candidates_; }
  auto delta() const -> double { return delta_; }

  auto decide(const Frequency_vector<S>& freq, Rng& rng) const -> Estimator_report<S> {
    auto report = Estimator_report<S>{};
    report.candidates = candidates_.size();
    report.delta = delta_;
    if (candidates_.size() == 1) {
      report.estimate = candidates_.front();
      return report;
    }
    if (freq.total == 0) {
      throw std::invalid_argument("frequency vector is empty");
    }
    report.tests_run = true;
    auto m = static_cast<double>(freq.total);
    auto passing = std::vector<std::size_t>{};
    for (auto a = std::size_t{0}; a < candidates_.size(); ++a) {
      auto worst = std::numeric_limits<double>::infinity();
      for (auto b = std::size_t{0}; b < candidates_.size(); ++b) {
        if (a == b) continue;
        auto observed = static_cast<double>(freq.count(tests_[a][b].event)) / m;
        worst = std::min(worst, observed - tests_[a][b].threshold);
      }
      report.margins.emplace_back(candidates_[a], worst);
      if (worst > 0.0) passing.push_back(a);
    }
    auto& counters = exclusivity_counters();
    counters.invocations.fetch_add(1, std::memory_order_relaxed);
    if (passing.size() > 1) {
      counters.violations.fetch_add(1, std::memory_order_relaxed);
      throw std::logic_error("frequency test exclusivity violated: more than one state passed");
    }
    if (passing.size() == 1) {
      report.estimate = candidates_[passing.front()];
      report.margin = report.margins[passing.front()].second;
    } else {
      auto pick = rng.index(candidates_.size());
      report.estimate = candidates_[pick];
      report.margin = report.margins[pick].second;
      report.fallback = true;
    }
    return report;
  }

 private:
  struct Test {
    Event<S> event;
    double threshold = 0.0;  // p_{i,A}(h*) - delta/2
  };

  std::vector<S> candidates_;
  double delta_ = std::numeric_limits<double>::infinity();
  std::vector<std::vector<Test>> tests_;
};

// Frequency-test root estimator restricted to `candidates`, with transition rows
// at h_star for each candidate.
template <typename S>
auto frequency_estimate(const Tree& tree, const Generative_process<S>& process, const Leaf_assignment<S>& observed,
                        double s, double h_star, const std::vector<S>& candidates,
                        const std::map<S, Distribution<S>>& rows, Rng& rng) -> Estimator_report<S> {
  auto test = Frequency_test<S>{candidates, rows};
  auto plan = plan_stretch(tree, s, h_star);
  auto sample = stretch_observation(plan, process, observed, rng);
  auto report = test.decide(sample.frequencies, rng);
  report.restriction = sample.info;
  return report;
}

// Reuses a precomputed plan and test across many observations on the same tree.
template <typename S>
auto frequency_estimate(const Stretch_plan& plan, const Frequency_test<S>& test, const Generative_process<S>& process,
                        const Leaf_assignment<S>& observed, Rng& rng) -> Estimator_report<S> {
  auto sample = stretch_observation(plan, process, observed, rng);
  auto report = test.decide(sample.frequencies, rng);
  report.restriction = sample.info;
  return report;
}

// Rows p^i(h_star) on demand.
template <typename S>
using Row_provider = std::function<Distribution<S>(const S&)>;

// Thread-safe memoization of a row provider.
template <typename S>
class Row_cache {
 public:
  explicit Row_cache(Row_provider<S> provider) : provider_{std::move(provider)} {}

  auto rows(const std::vector<S>& states) -> std::map<S, Distribution<S>> {
    auto out = std::map<S, Distribution<S>>{};
    for (const auto& s : states) {
      out.emplace(s, row(s));
    }
    return out;
  }

  auto row(const S& state) -> Distribution<S> {
    {
      auto lock = std::scoped_lock{mutex_};
      if (auto it = cache_.find(state); it != cache_.end()) return it->second;
    }
    auto computed = provider_(state);
    auto lock = std::scoped_lock{mutex_};
    return cache_.emplace(state, std::move(computed)).first->second;
  }

 private:
  Row_provider<S> provider_;
  std::mutex mutex_;
  std::map<S, Distribution<S>> cache_;
};

// Uniform-chain estimator: candidates are the states whose stretched frequency is at
// least f_*/2 with f_* = exp(-q_star h_star); then the frequency test over them.
template <typename S>
auto uniform_chain_estimate(const Stretch_plan& plan, const Generative_process<S>& process,
                            const Leaf_assignment<S>& observed, double q_star, Row_cache<S>& rows, Rng& rng)
    -> Estimator_report<S> {
  auto sample = stretch_observation(plan, process, observed, rng);
  auto f = f_star(q_star, plan.info.h_star);
  auto m = static_cast<double>(sample.frequencies.total);
  auto candidates = std::vector<S>{};
  for (const auto& [state, c] : sample.frequencies.counts) {
    if (static_cast<double>(c) / m >= 0.5 * f) candidates.push_back(state);
  }
  if (candidates.empty()) {
    auto report = Estimator_report<S>{};
    auto pick = rng.index(sample.frequencies.counts.size());
    report.estimate = std::next(sample.frequencies.counts.begin(), static_cast<std::ptrdiff_t>(pick))->first;
    report.fallback = true;
    report.restriction = sample.info;
    return report;
  }
  auto test = Frequency_test<S>{candidates, rows.rows(candidates)};
  auto report = test.decide(sample.frequencies, rng);
  report.restriction = sample.info;
  return report;
}

template <typename S>
auto uniform_chain_estimate(const Tree& tree, const Generative_process<S>& process, const Leaf_assignment<S>& observed,
                            double s, double h_star, double q_star, Row_cache<S>& rows, Rng& rng)
    -> Estimator_report<S> {
  if (!(q_star >= 1.0)) {
    throw std::invalid_argument("q_star must be at least 1");
  }
  return uniform_chain_estimate(plan_stretch(tree, s, h_star), process, observed, q_star, rows, rng);
}

// Monte Carlo plug-in row: empirical law of `samples` endpoints after time t.
template <typename S>
auto monte_carlo_row(const Generative_process<S>& process, const S& start, double t, std::size_t samples, Rng& rng)
    -> Distribution<S> {
  if (samples == 0) {
    throw std::invalid_argument("plug-in rows need at least one sample");
  }
  auto counts = std::map<S, std::size_t>{};
  for (auto k = std::size_t{0}; k < samples; ++k) {
    ++counts[process.sample(start, t, rng)];
  }
  return Distribution<S>::from_counts(counts);
}

// Majority vote for a two-state chain on an odd number of leaves.
auto majority_estimate(const Leaf_assignment<State>& observed) -> State;

}  // namespace rootrecon
