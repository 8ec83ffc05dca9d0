#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "rootrecon/tree.hpp"

namespace rootrecon {

enum class Family_kind { star, pinched_star, figure1, figure2, random_ultrametric };

auto parse_family_kind(std::string_view name) -> Family_kind;
auto to_string(Family_kind kind) -> std::string;

struct Family_params {
  // star, pinched_star, random_ultrametric: final leaf count.
  // figure1, figure2: number of spine attachment vertices (final tree has k+1 leaves
  // plus, for figure2, the heavy subtree).
  int k = 1;
  double height = 1.0;
  double pinch = 0.05;  // pinched_star: length of the shared root edge
  int heavy = -1;       // figure2: leaves in the heavy subtree under v_1; -1 means k*k
};

// Deterministic for a given seed (only random_ultrametric consumes randomness).
//   star               T^j has j leaves hanging off the root.
//   pinched_star       root -- pinch (length `pinch`) -- j leaves, all at depth `height`.
//   figure1            spine vertex v_i at depth height*2^-i, each with one leaf at depth `height`.
//   figure2            figure1 plus a heavy subtree of leaves below v_1.
//   random_ultrametric each new leaf attaches at a uniform depth on the path to a
//                      uniformly chosen existing leaf; all leaves at depth `height`.
auto generate_family(Family_kind kind, const Family_params& params, std::uint64_t seed = 0) -> Nested_family;

// Zero-padded so that lexicographic order matches insertion order.
auto leaf_label(std::string_view prefix, int index, int total) -> std::string;

}  // namespace rootrecon
