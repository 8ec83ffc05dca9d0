#include "rootrecon/tree.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace rootrecon {

Tree::Tree(std::vector<Node_spec> nodes) {
  auto n = nodes.size();
  if (n < 2) {
    throw std::invalid_argument("tree needs a root and at least one edge");
  }
  // Place the root at index 0 and remap parents.
  auto root_index = std::size_t{n};
  for (auto i = std::size_t{0}; i < n; ++i) {
    if (nodes[i].parent == no_vertex) {
      if (root_index != n) {
        throw std::invalid_argument("tree has more than one root");
      }
      root_index = i;
    } else if (nodes[i].parent < 0 || static_cast<std::size_t>(nodes[i].parent) >= n) {
      throw std::invalid_argument("parent index out of range for vertex '" + nodes[i].name + "'");
    }
  }
  if (root_index == n) {
    throw std::invalid_argument("tree has no root");
  }

  auto kids = std::vector<std::vector<std::size_t>>(n);
  for (auto i = std::size_t{0}; i < n; ++i) {
    if (i != root_index) {
      kids[nodes[i].parent].push_back(i);
      if (!(nodes[i].length > 0.0) || !std::isfinite(nodes[i].length)) {
        throw std::invalid_argument("edge lengths must be positive and finite (vertex '" + nodes[i].name + "')");
      }
    }
  }

  // Preorder from the root; anything unreached sits on a cycle.
  auto order = std::vector<std::size_t>{};
  order.reserve(n);
  auto new_index = std::vector<Vertex>(n, no_vertex);
  auto stack = std::vector<std::size_t>{root_index};
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    new_index[v] = static_cast<Vertex>(order.size());
    order.push_back(v);
    for (auto it = kids[v].rbegin(); it != kids[v].rend(); ++it) {
      stack.push_back(*it);
    }
  }
  if (order.size() != n) {
    throw std::invalid_argument("tree contains a cycle or disconnected vertices");
  }

  names_.resize(n);
  parent_.resize(n);
  length_.resize(n);
  children_.resize(n);
  depth_.resize(n);
  for (auto k = std::size_t{0}; k < n; ++k) {
    const auto& spec = nodes[order[k]];
    names_[k] = spec.name;
    if (k == 0) {
      parent_[k] = no_vertex;
      length_[k] = 0.0;
      depth_[k] = 0.0;
    } else {
      parent_[k] = new_index[spec.parent];
      length_[k] = spec.length;
      depth_[k] = depth_[parent_[k]] + spec.length;
      children_[parent_[k]].push_back(static_cast<Vertex>(k));
    }
  }

  for (auto v = Vertex{0}; v < static_cast<Vertex>(n); ++v) {
    if (!names_[v].empty()) {
      auto [it, inserted] = index_.emplace(names_[v], v);
      if (!inserted) {
        throw std::invalid_argument("duplicate vertex name '" + names_[v] + "'");
      }
    }
    if (is_leaf(v)) {
      if (names_[v].empty()) {
        throw std::invalid_argument("every leaf needs a name");
      }
      leaves_.push_back(v);
      height_ = std::max(height_, depth_[v]);
    }
  }
  std::ranges::sort(leaves_, [this](Vertex a, Vertex b) { return names_[a] < names_[b]; });
}

auto Tree::leaf_names() const -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  out.reserve(leaves_.size());
  for (auto v : leaves_) {
    out.push_back(names_[v]);
  }
  return out;
}

auto Tree::find(std::string_view name) const -> std::optional<Vertex> {
  if (auto it = index_.find(std::string{name}); it != index_.end()) {
    return it->second;
  }
  return std::nullopt;
}

auto Tree::leaf(std::string_view name) const -> Vertex {
  auto v = find(name);
  if (!v || !is_leaf(*v)) {
    throw std::invalid_argument("unknown leaf '" + std::string{name} + "'");
  }
  return *v;
}

auto Tree::descendant_leaves(Vertex v) const -> std::vector<Vertex> {
  auto out = std::vector<Vertex>{};
  auto stack = std::vector<Vertex>{v};
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    if (is_leaf(u)) {
      out.push_back(u);
    }
    for (auto c : children_[u]) {
      stack.push_back(c);
    }
  }
  std::ranges::sort(out, [this](Vertex a, Vertex b) { return names_[a] < names_[b]; });
  return out;
}

auto Tree::leaves_below() const -> std::vector<std::size_t> {
  auto counts = std::vector<std::size_t>(vertex_count(), 0);
  // Preorder indexing means children always come after parents.
  for (auto v = static_cast<Vertex>(vertex_count()) - 1; v >= 0; --v) {
    if (is_leaf(v)) {
      counts[v] = 1;
    }
    if (v != root()) {
      counts[parent_[v]] += counts[v];
    }
  }
  return counts;
}

auto Tree::nodes() const -> std::vector<Node_spec> {
  auto out = std::vector<Node_spec>{};
  out.reserve(vertex_count());
  for (auto v = Vertex{0}; v < static_cast<Vertex>(vertex_count()); ++v) {
    out.push_back({names_[v], parent_[v], length_[v]});
  }
  return out;
}

auto shared_path_length(const Tree& tree, std::string_view x, std::string_view y) -> double {
  auto a = tree.leaf(x);
  auto b = tree.leaf(y);
  if (a == b) {
    throw std::invalid_argument("shared path length needs two distinct leaves");
  }
  // Preorder: a parent always has a smaller index than its children.
  while (a != b) {
    if (a > b) {
      a = tree.parent(a);
    } else {
      b = tree.parent(b);
    }
  }
  return tree.depth(a);
}

auto spread(const Tree& tree) -> double {
  auto n = tree.leaf_count();
  if (n < 2) {
    throw std::invalid_argument("spread needs at least two leaves");
  }
  // Each edge contributes its part above depth 1 once per ordered pair of leaves below it.
  auto below = tree.leaves_below();
  auto total = 0.0;
  for (auto v = Vertex{1}; v < static_cast<Vertex>(tree.vertex_count()); ++v) {
    auto top = std::min(tree.depth(tree.parent(v)), 1.0);
    auto bottom = std::min(tree.depth(v), 1.0);
    auto k = static_cast<double>(below[v]);
    total += (bottom - top) * k * (k - 1.0);
  }
  return total / (static_cast<double>(n) * static_cast<double>(n - 1));
}

auto truncate(const Tree& tree, double s) -> std::vector<Tree_point> {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw std::invalid_argument("truncation distance must be positive");
  }
  if (s <= depth_tolerance) {
    return {Tree_point{tree.root(), 0.0}};
  }
  auto out = std::vector<Tree_point>{};
  for (auto v = Vertex{1}; v < static_cast<Vertex>(tree.vertex_count()); ++v) {
    auto top = tree.depth(tree.parent(v));
    if (top >= s - depth_tolerance) {
      continue;  // edge starts at or beyond the boundary
    }
    auto bottom = tree.depth(v);
    if (bottom >= s - depth_tolerance) {
      auto at_vertex = std::abs(bottom - s) <= depth_tolerance;
      out.push_back({v, at_vertex ? tree.edge_length(v) : s - top});
    } else if (tree.is_leaf(v)) {
      out.push_back({v, tree.edge_length(v)});
    }
  }
  return out;
}

auto leaves_below(const Tree& tree, const Tree_point& point) -> std::vector<Vertex> {
  return tree.descendant_leaves(point.edge);
}

auto restrict(const Tree& tree, std::span<const std::string> leaves) -> Tree {
  if (leaves.empty()) {
    throw std::invalid_argument("restriction needs a nonempty leaf subset");
  }
  auto kept = std::vector<char>(tree.vertex_count(), 0);
  for (const auto& name : leaves) {
    for (auto v = tree.leaf(name); v != no_vertex && !kept[v]; v = tree.parent(v)) {
      kept[v] = 1;
    }
  }

  auto nodes = std::vector<Node_spec>{{tree.name(tree.root()), no_vertex, 0.0}};
  // (original vertex, index in `nodes`)
  auto stack = std::vector<std::pair<Vertex, Vertex>>{{tree.root(), 0}};
  while (!stack.empty()) {
    auto [v, at] = stack.back();
    stack.pop_back();
    for (auto c : tree.children(v)) {
      if (!kept[c]) {
        continue;
      }
      auto length = tree.edge_length(c);
      auto u = c;
      while (!tree.is_leaf(u)) {
        auto only = no_vertex;
        auto count = 0;
        for (auto g : tree.children(u)) {
          if (kept[g]) {
            only = g;
            ++count;
          }
        }
        if (count != 1) {
          break;
        }
        u = only;
        length += tree.edge_length(u);
      }
      auto index = static_cast<Vertex>(nodes.size());
      nodes.push_back({tree.name(u), at, length});
      stack.emplace_back(u, index);
    }
  }
  return Tree{std::move(nodes)};
}

auto extract_well_spread_restriction(const Tree& tree, double s) -> Tree {
  auto chosen = std::vector<std::string>{};
  for (const auto& point : truncate(tree, s)) {
    chosen.push_back(tree.name(leaves_below(tree, point).front()));
  }
  return restrict(tree, chosen);
}

auto stretch_to_height(const Tree& tree, double h_star) -> Tree {
  if (!(h_star >= tree.height() - depth_tolerance)) {
    throw std::invalid_argument("stretch height is below the tree height");
  }
  auto nodes = tree.nodes();
  for (auto v : tree.leaves()) {
    auto extra = h_star - tree.depth(v);
    if (extra > 0.0) {
      nodes[v].length += extra;
    }
  }
  return Tree{std::move(nodes)};
}

auto attach_leaf(const Tree& tree, std::string_view anchor, double at_depth, std::string name,
                 double leaf_depth) -> Tree {
  auto target = tree.leaf(anchor);
  if (tree.find(name)) {
    throw std::invalid_argument("vertex name '" + name + "' already in use");
  }
  if (!(at_depth >= 0.0) || at_depth >= tree.depth(target) - depth_tolerance) {
    throw std::invalid_argument("attachment depth must lie strictly above the anchor leaf");
  }
  if (!(leaf_depth > at_depth)) {
    throw std::invalid_argument("new leaf must be deeper than its attachment point");
  }

  auto nodes = tree.nodes();
  // Walk up from the anchor to the edge whose lower end lies below the attachment depth.
  auto v = target;
  while (tree.depth(tree.parent(v)) > at_depth + depth_tolerance) {
    v = tree.parent(v);
  }
  auto attach_at = tree.parent(v);
  if (std::abs(tree.depth(attach_at) - at_depth) > depth_tolerance) {
    auto top = tree.depth(attach_at);
    attach_at = static_cast<Vertex>(nodes.size());
    nodes.push_back({"", tree.parent(v), at_depth - top});
    nodes[v].parent = attach_at;
    nodes[v].length = tree.depth(v) - at_depth;
  }
  auto from = attach_at < static_cast<Vertex>(tree.vertex_count()) ? tree.depth(attach_at) : at_depth;
  nodes.push_back({std::move(name), attach_at, leaf_depth - from});
  return Tree{std::move(nodes)};
}

namespace {

// Clade (joined leaf names) -> incoming edge length, for the merged form of `tree`.
auto clade_lengths(const Tree& tree) -> std::map<std::string, double> {
  auto canonical = restrict(tree, tree.leaf_names());
  auto out = std::map<std::string, double>{};
  for (auto v = Vertex{1}; v < static_cast<Vertex>(canonical.vertex_count()); ++v) {
    auto key = std::string{};
    for (auto leaf : canonical.descendant_leaves(v)) {
      key += canonical.name(leaf);
      key += '\n';
    }
    out[key] += canonical.edge_length(v);
  }
  return out;
}

}  // namespace

auto equivalent(const Tree& a, const Tree& b, double tol) -> bool {
  auto ca = clade_lengths(a);
  auto cb = clade_lengths(b);
  if (ca.size() != cb.size()) {
    return false;
  }
  for (auto ia = ca.begin(), ib = cb.begin(); ia != ca.end(); ++ia, ++ib) {
    if (ia->first != ib->first || std::abs(ia->second - ib->second) > tol) {
      return false;
    }
  }
  return true;
}

auto find_nesting_violation(const Nested_family& family) -> std::optional<std::size_t> {
  for (auto k = std::size_t{1}; k < family.size(); ++k) {
    const auto& prev = family[k - 1];
    const auto& cur = family[k];
    if (cur.leaf_count() != prev.leaf_count() + 1 || cur.name(cur.root()) != prev.name(prev.root())) {
      return k;
    }
    try {
      if (!equivalent(restrict(cur, prev.leaf_names()), prev)) {
        return k;
      }
    } catch (const std::invalid_argument&) {
      return k;  // a previous leaf is missing from the current tree
    }
  }
  return std::nullopt;
}

auto big_bang_profile(const Nested_family& family, std::span<const double> s_grid) -> Big_bang_profile {
  if (family.empty() || s_grid.empty()) {
    throw std::invalid_argument("big bang profile needs a nonempty family and grid");
  }
  for (auto s : s_grid) {
    if (!(s > 0.0) || !std::isfinite(s)) {
      throw std::invalid_argument("grid values must be positive and finite");
    }
  }
  auto profile = Big_bang_profile{};
  profile.s_grid.assign(s_grid.begin(), s_grid.end());
  for (const auto& tree : family) {
    auto row = std::vector<std::size_t>{};
    for (auto s : s_grid) {
      row.push_back(truncate(tree, s).size());
    }
    profile.counts.push_back(std::move(row));
  }
  auto k = family.size();
  auto first = k / 2;  // last half: indices [k/2, k)
  if (k - first >= 2) {
    for (auto g = std::size_t{0}; g < s_grid.size(); ++g) {
      auto constant = std::all_of(profile.counts.begin() + static_cast<std::ptrdiff_t>(first), profile.counts.end(),
                                  [&](const auto& row) { return row[g] == profile.counts[first][g]; });
      if (constant) {
        profile.flagged.push_back(s_grid[g]);
      }
    }
  }
  return profile;
}

}  // namespace rootrecon
