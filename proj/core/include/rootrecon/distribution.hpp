#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <iterator>
#include <set>
#include <stdexcept>
#include <string>

namespace rootrecon {

// Masses within this distance of 1 are renormalized; anything further is rejected.
inline constexpr double mass_tolerance = 1e-12;

// Sparse probability mass function over an ordered state type. Only states with
// positive mass are stored.
template <typename S>
class Distribution {
 public:
  using Map = std::map<S, double>;

  explicit Distribution(Map masses) : masses_{std::move(masses)} {
    auto total = 0.0;
    for (auto it = masses_.begin(); it != masses_.end();) {
      if (!(it->second >= 0.0) || !std::isfinite(it->second)) {
        throw std::invalid_argument("probability masses must be finite and nonnegative");
      }
      total += it->second;
      it = it->second == 0.0 ? masses_.erase(it) : std::next(it);
    }
    if (!(std::abs(total - 1.0) <= mass_tolerance)) {
      throw std::invalid_argument("probability masses sum to " + std::to_string(total) + ", not 1");
    }
    if (total != 1.0) {
      for (auto& [state, p] : masses_) {
        p /= total;
      }
    }
  }

  static auto point_mass(const S& state) -> Distribution { return Distribution{Map{{state, 1.0}}}; }

  // Empirical law of `total` draws.
  template <typename Count>
  static auto from_counts(const std::map<S, Count>& counts) -> Distribution {
    auto total = 0.0;
    for (const auto& [state, c] : counts) {
      total += static_cast<double>(c);
    }
    if (!(total > 0.0)) {
      throw std::invalid_argument("empirical distribution needs at least one draw");
    }
    auto masses = Map{};
    for (const auto& [state, c] : counts) {
      masses.emplace(state, static_cast<double>(c) / total);
    }
    return Distribution{std::move(masses)};
  }

  auto operator()(const S& state) const -> double {
    auto it = masses_.find(state);
    return it == masses_.end() ? 0.0 : it->second;
  }

  auto masses() const -> const Map& { return masses_; }
  auto support_size() const -> std::size_t { return masses_.size(); }
  auto begin() const { return masses_.begin(); }
  auto end() const { return masses_.end(); }

 private:
  Map masses_;
};

// Either a finite set or the complement of one, so events over countable state
// spaces stay representable.
template <typename S>
struct Event {
  std::set<S> members;
  bool complement = false;

  auto contains(const S& state) const -> bool { return members.contains(state) != complement; }

  auto probability(const Distribution<S>& dist) const -> double {
    auto inside = 0.0;
    for (const auto& state : members) {
      inside += dist(state);
    }
    return complement ? 1.0 - inside : inside;
  }

  auto complemented() const -> Event { return Event{members, !complement}; }
};

// Calls f(state, a(state), b(state)) over the union of supports, in state order.
template <typename S, typename F>
void for_each_joint(const Distribution<S>& a, const Distribution<S>& b, F&& f) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      f(ia->first, ia->second, 0.0);
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      f(ib->first, 0.0, ib->second);
      ++ib;
    } else {
      f(ia->first, ia->second, ib->second);
      ++ia;
      ++ib;
    }
  }
}

// Half the L1 distance.
template <typename S>
auto total_variation(const Distribution<S>& a, const Distribution<S>& b) -> double {
  auto sum = 0.0;
  for_each_joint(a, b, [&](const S&, double pa, double pb) { sum += std::abs(pa - pb); });
  return std::min(1.0, 0.5 * sum);
}

// A = {a > b} plus the ties {a == b} exactly when first_label < second_label.
// Swapping the orientation yields the complement, and a(A) - b(A) = TV(a, b).
template <typename S, typename L>
auto tv_achieving_set(const Distribution<S>& a, const Distribution<S>& b, const L& first_label,
                      const L& second_label) -> Event<S> {
  auto event = Event<S>{};
  if (first_label < second_label) {
    // {a >= b} = complement of {a < b}; covers every state outside both supports.
    event.complement = true;
    for_each_joint(a, b, [&](const S& s, double pa, double pb) {
      if (pa < pb) event.members.insert(s);
    });
  } else {
    for_each_joint(a, b, [&](const S& s, double pa, double pb) {
      if (pa > pb) event.members.insert(s);
    });
  }
  return event;
}

}  // namespace rootrecon
