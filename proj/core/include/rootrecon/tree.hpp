#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace rootrecon {

using Vertex = int;
inline constexpr Vertex no_vertex = -1;

// Absolute tolerance for depth equality at truncation boundaries.
inline constexpr double depth_tolerance = 1e-12;

struct Node_spec {
  std::string name;  // required and unique for leaves; optional for internal vertices
  Vertex parent;     // no_vertex for the root
  double length;     // length of the edge from parent; ignored for the root
};

// A point on the tree: the edge is identified by its child endpoint, and `offset`
// is measured from the edge's parent endpoint, in (0, length]. offset == length
// denotes the child vertex itself. The root is the point {root, 0}.
struct Tree_point {
  Vertex edge;
  double offset;

  friend auto operator==(const Tree_point&, const Tree_point&) -> bool = default;
};

// Finite, edge-weighted, rooted tree. Immutable once built; every edge has
// strictly positive length. Vertex 0 is always the root.
class Tree {
 public:
  explicit Tree(std::vector<Node_spec> nodes);

  auto root() const -> Vertex { return 0; }
  auto vertex_count() const -> std::size_t { return parent_.size(); }
  auto name(Vertex v) const -> const std::string& { return names_[v]; }
  auto parent(Vertex v) const -> Vertex { return parent_[v]; }
  auto edge_length(Vertex v) const -> double { return length_[v]; }
  auto children(Vertex v) const -> std::span<const Vertex> { return children_[v]; }
  auto depth(Vertex v) const -> double { return depth_[v]; }
  auto is_leaf(Vertex v) const -> bool { return v != root() && children_[v].empty(); }
  auto height() const -> double { return height_; }

  // Leaves in lexicographic order of their names.
  auto leaves() const -> std::span<const Vertex> { return leaves_; }
  auto leaf_count() const -> std::size_t { return leaves_.size(); }
  auto leaf_names() const -> std::vector<std::string>;

  auto find(std::string_view name) const -> std::optional<Vertex>;
  // Throws std::invalid_argument for unknown or non-leaf names.
  auto leaf(std::string_view name) const -> Vertex;

  // Leaves below v (v itself if it is a leaf), in lexicographic order.
  auto descendant_leaves(Vertex v) const -> std::vector<Vertex>;
  // Number of leaves below each vertex.
  auto leaves_below() const -> std::vector<std::size_t>;

  auto nodes() const -> std::vector<Node_spec>;

 private:
  std::vector<std::string> names_;
  std::vector<Vertex> parent_;
  std::vector<double> length_;
  std::vector<std::vector<Vertex>> children_;
  std::vector<double> depth_;
  std::vector<Vertex> leaves_;
  std::unordered_map<std::string, Vertex> index_;
  double height_ = 0.0;
};

// Ordered list of trees sharing the root; each is the previous plus one leaf edge.
using Nested_family = std::vector<Tree>;

// Length of the shared part of the root-to-x and root-to-y paths.
auto shared_path_length(const Tree& tree, std::string_view x, std::string_view y) -> double;

// Average of min(shared path length, 1) over ordered pairs of distinct leaves.
auto spread(const Tree& tree) -> double;

// Boundary of the truncation at distance s: points at depth s on root-to-leaf
// paths (a vertex at depth s stands for itself) plus leaves shallower than s.
auto truncate(const Tree& tree, double s) -> std::vector<Tree_point>;

// Leaves below a boundary point, lexicographically ordered.
auto leaves_below(const Tree& tree, const Tree_point& point) -> std::vector<Vertex>;

// Keeps only root-to-leaf paths for `leaves`; merges non-root vertices left with a
// single child, summing their edge lengths.
auto restrict(const Tree& tree, std::span<const std::string> leaves) -> Tree;

// One leaf per truncation boundary point (the lexicographically smallest below it).
auto extract_well_spread_restriction(const Tree& tree, double s) -> Tree;

// Lengthens leaf edges so every leaf sits at depth h_star.
auto stretch_to_height(const Tree& tree, double h_star) -> Tree;

// Adds leaf `name` hanging off the root-to-`anchor` path at depth `at_depth`, with
// the new leaf at depth `leaf_depth`. Reuses an existing vertex at that depth.
auto attach_leaf(const Tree& tree, std::string_view anchor, double at_depth, std::string name,
                 double leaf_depth) -> Tree;

// Same leaf-labelled topology and edge lengths after degree-2 merging.
auto equivalent(const Tree& a, const Tree& b, double tol = 1e-9) -> bool;

// Index of the first family member that is not a one-leaf extension of its
// predecessor, or nullopt when the family is properly nested.
auto find_nesting_violation(const Nested_family& family) -> std::optional<std::size_t>;

struct Big_bang_profile {
  std::vector<double> s_grid;
  std::vector<std::vector<std::size_t>> counts;  // counts[k][g] = |boundary of T^k at s_grid[g]|
  std::vector<double> flagged;                   // s values whose count is constant over the last half
};

// Diagnostic only: big bang is an asymptotic property of the whole sequence.
auto big_bang_profile(const Nested_family& family, std::span<const double> s_grid) -> Big_bang_profile;

}  // namespace rootrecon
