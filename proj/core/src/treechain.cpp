#include "rootrecon/treechain.hpp"

#include <cmath>
#include <stdexcept>

#include "rootrecon/errors.hpp"

namespace rootrecon {

auto to_leaf_tuple(const Tree& tree, const Leaf_assignment<State>& leaves) -> Leaf_tuple {
  auto out = Leaf_tuple{};
  out.reserve(tree.leaf_count());
  for (auto v : tree.leaves()) {
    auto it = leaves.find(tree.name(v));
    if (it == leaves.end()) {
      throw std::invalid_argument("leaf assignment is missing leaf '" + tree.name(v) + "'");
    }
    out.push_back(it->second);
  }
  return out;
}

namespace {

using Partial_law = std::map<Leaf_tuple, double>;

struct Subtree_law {
  std::vector<Vertex> leaf_order;        // leaves of the subtree, in tuple order
  std::vector<Partial_law> given_state;  // indexed by the state at the subtree root
};

auto subtree_law(const Tree& tree, const Rate_matrix& q, Vertex v) -> Subtree_law {
  auto n = q.size();
  auto out = Subtree_law{};
  out.given_state.resize(n);
  if (tree.is_leaf(v)) {
    out.leaf_order = {v};
    for (auto x = State{0}; x < static_cast<State>(n); ++x) {
      out.given_state[x] = {{Leaf_tuple{x}, 1.0}};
    }
    return out;
  }

  for (auto x = State{0}; x < static_cast<State>(n); ++x) {
    out.given_state[x] = {{Leaf_tuple{}, 1.0}};
  }
  for (auto c : tree.children(v)) {
    auto child = subtree_law(tree, q, c);
    auto p = transition_matrix(q, tree.edge_length(c));
    out.leaf_order.insert(out.leaf_order.end(), child.leaf_order.begin(), child.leaf_order.end());
    for (auto x = State{0}; x < static_cast<State>(n); ++x) {
      // Law of the child's leaves given state x at v.
      auto through_edge = Partial_law{};
      for (auto y = State{0}; y < static_cast<State>(n); ++y) {
        auto pxy = p(x, y);
        if (pxy == 0.0) {
          continue;
        }
        for (const auto& [tuple, mass] : child.given_state[y]) {
          through_edge[tuple] += pxy * mass;
        }
      }
      auto combined = Partial_law{};
      for (const auto& [left, pl] : out.given_state[x]) {
        for (const auto& [right, pr] : through_edge) {
          auto tuple = left;
          tuple.insert(tuple.end(), right.begin(), right.end());
          combined[std::move(tuple)] += pl * pr;
        }
      }
      out.given_state[x] = std::move(combined);
    }
  }
  return out;
}

}  // namespace

auto exact_leaf_law(const Tree& tree, const Rate_matrix& q, State root_state) -> Leaf_law {
  auto n = q.size();
  if (root_state < 0 || static_cast<std::size_t>(root_state) >= n) {
    throw std::invalid_argument("root state out of range");
  }
  auto outcomes = std::pow(static_cast<double>(n), static_cast<double>(tree.leaf_count()));
  if (outcomes > leaf_law_outcome_limit) {
    throw Guard_violation("exact leaf law would have " + std::to_string(outcomes) + " outcomes (limit 1e6)");
  }
  auto law = subtree_law(tree, q, tree.root());

  // Reorder tuple positions into lexicographic leaf order.
  auto position = std::vector<std::size_t>(tree.vertex_count(), 0);
  for (auto k = std::size_t{0}; k < tree.leaf_count(); ++k) {
    position[tree.leaves()[k]] = k;
  }
  auto masses = Leaf_law::Map{};
  for (const auto& [tuple, mass] : law.given_state[root_state]) {
    auto sorted = Leaf_tuple(tuple.size());
    for (auto k = std::size_t{0}; k < tuple.size(); ++k) {
      sorted[position[law.leaf_order[k]]] = tuple[k];
    }
    masses[std::move(sorted)] += mass;
  }
  // Each edge matrix is renormalized, so the total is 1 up to rounding.
  auto total = 0.0;
  for (const auto& [tuple, mass] : masses) {
    total += mass;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    throw std::runtime_error("exact leaf law does not sum to 1");
  }
  for (auto& [tuple, mass] : masses) {
    mass /= total;
  }
  return Leaf_law{std::move(masses)};
}

auto exact_leaf_tv(const Tree& tree, const Rate_matrix& q, State i, State j) -> double {
  if (i == j) {
    return 0.0;
  }
  return total_variation(exact_leaf_law(tree, q, i), exact_leaf_law(tree, q, j));
}

}  // namespace rootrecon
