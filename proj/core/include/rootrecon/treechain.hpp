#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "rootrecon/ctmc.hpp"
#include "rootrecon/distribution.hpp"
#include "rootrecon/rng.hpp"
#include "rootrecon/tree.hpp"

namespace rootrecon {

// Leaf name -> state for one realization.
template <typename S>
using Leaf_assignment = std::map<std::string, S>;

// Joint leaf states, ordered like Tree::leaves() (lexicographic leaf names).
using Leaf_tuple = std::vector<State>;
using Leaf_law = Distribution<Leaf_tuple>;

inline constexpr double leaf_law_outcome_limit = 1e6;

// States at every vertex: the root gets `root_state`, then each edge runs the
// process for its length starting from the parent's state.
template <typename S>
auto simulate_vertices(const Tree& tree, const Generative_process<S>& process, const S& root_state, Rng& rng)
    -> std::vector<S> {
  auto states = std::vector<S>{};
  states.reserve(tree.vertex_count());
  states.push_back(root_state);
  // Vertices are stored in preorder, so parents are always filled in first.
  for (auto v = Vertex{1}; v < static_cast<Vertex>(tree.vertex_count()); ++v) {
    states.push_back(process.sample(states[tree.parent(v)], tree.edge_length(v), rng));
  }
  return states;
}

template <typename S>
auto leaf_states(const Tree& tree, const std::vector<S>& vertex_states) -> Leaf_assignment<S> {
  auto out = Leaf_assignment<S>{};
  for (auto v : tree.leaves()) {
    out.emplace_hint(out.end(), tree.name(v), vertex_states[v]);
  }
  return out;
}

template <typename S>
auto simulate(const Tree& tree, const Generative_process<S>& process, const S& root_state, Rng& rng)
    -> Leaf_assignment<S> {
  return leaf_states(tree, simulate_vertices(tree, process, root_state, rng));
}

auto to_leaf_tuple(const Tree& tree, const Leaf_assignment<State>& leaves) -> Leaf_tuple;

// Exact joint law of the leaf states given the root state, by summing over internal
// states edge by edge. Throws Guard_violation when |S|^|leaves| exceeds 10^6.
auto exact_leaf_law(const Tree& tree, const Rate_matrix& q, State root_state) -> Leaf_law;

auto exact_leaf_tv(const Tree& tree, const Rate_matrix& q, State i, State j) -> double;

}  // namespace rootrecon
