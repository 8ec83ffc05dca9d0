#pragma once

#include <string>
#include <string_view>

#include "rootrecon/tree.hpp"

namespace rootrecon {

// Newick with branch lengths: leaf names required, internal names optional,
// every non-root branch needs a positive length. A root length is ignored.
auto parse_newick(std::string_view text) -> Tree;

auto to_newick(const Tree& tree) -> std::string;

// One Newick tree per non-empty line; '#' starts a comment line.
auto read_family_file(const std::string& path) -> Nested_family;

auto read_newick_file(const std::string& path) -> Tree;

}  // namespace rootrecon
