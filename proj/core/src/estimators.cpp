#include "rootrecon/estimators.hpp"

namespace rootrecon {

auto exclusivity_counters() -> Exclusivity_counters& {
  static auto counters = Exclusivity_counters{};
  return counters;
}

auto plan_stretch(const Tree& tree, double s, double h_star) -> Stretch_plan {
  if (!(h_star >= tree.height() - depth_tolerance)) {
    throw std::invalid_argument("h_star is below the tree height");
  }
  auto restricted = extract_well_spread_restriction(tree, s);
  auto plan = Stretch_plan{};
  plan.info.s = s;
  plan.info.h_star = h_star;
  plan.info.m = restricted.leaf_count();
  if (plan.info.m == 0) {
    throw std::invalid_argument("truncation produced no boundary points");
  }
  plan.info.spread = plan.info.m >= 2 ? spread(restricted) : 0.0;
  for (auto v : restricted.leaves()) {
    plan.leaves.push_back(restricted.name(v));
    plan.extension.push_back(std::max(0.0, h_star - restricted.depth(v)));
  }
  return plan;
}

auto majority_estimate(const Leaf_assignment<State>& observed) -> State {
  if (observed.size() % 2 == 0) {
    throw std::invalid_argument("majority vote needs an odd number of leaves");
  }
  auto counts = std::map<State, std::size_t>{};
  for (const auto& [leaf, state] : observed) {
    ++counts[state];
  }
  if (counts.size() > 2) {
    throw std::invalid_argument("majority vote is defined for two-state observations");
  }
  auto best = counts.begin();
  for (auto it = counts.begin(); it != counts.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

}  // namespace rootrecon
