#include "rootrecon/families.hpp"

#include <cmath>
#include <stdexcept>

#include "rootrecon/rng.hpp"

namespace rootrecon {

auto parse_family_kind(std::string_view name) -> Family_kind {
  if (name == "star") return Family_kind::star;
  if (name == "pinched_star") return Family_kind::pinched_star;
  if (name == "figure1") return Family_kind::figure1;
  if (name == "figure2") return Family_kind::figure2;
  if (name == "random_ultrametric") return Family_kind::random_ultrametric;
  throw std::invalid_argument("unknown family kind '" + std::string{name} + "'");
}

auto to_string(Family_kind kind) -> std::string {
  switch (kind) {
    case Family_kind::star: return "star";
    case Family_kind::pinched_star: return "pinched_star";
    case Family_kind::figure1: return "figure1";
    case Family_kind::figure2: return "figure2";
    case Family_kind::random_ultrametric: return "random_ultrametric";
  }
  return "unknown";
}

auto leaf_label(std::string_view prefix, int index, int total) -> std::string {
  auto width = std::to_string(std::max(total, 1)).size();
  auto digits = std::to_string(index);
  return std::string{prefix} + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

namespace {

auto first_tree(const std::string& leaf, double height) -> Tree {
  return Tree{{{"root", no_vertex, 0.0}, {leaf, 0, height}}};
}

}  // namespace

auto generate_family(Family_kind kind, const Family_params& params, std::uint64_t seed) -> Nested_family {
  if (params.k < 1) {
    throw std::invalid_argument("family size k must be at least 1");
  }
  if (!(params.height > 0.0) || !std::isfinite(params.height)) {
    throw std::invalid_argument("family height must be positive");
  }
  auto h = params.height;
  auto family = Nested_family{};

  switch (kind) {
    case Family_kind::star: {
      auto first = leaf_label("x", 1, params.k);
      family.push_back(first_tree(first, h));
      for (auto j = 2; j <= params.k; ++j) {
        family.push_back(attach_leaf(family.back(), first, 0.0, leaf_label("x", j, params.k), h));
      }
      break;
    }
    case Family_kind::pinched_star: {
      if (!(params.pinch > 0.0 && params.pinch < h)) {
        throw std::invalid_argument("pinched star needs 0 < pinch < height");
      }
      auto first = leaf_label("x", 1, params.k);
      family.push_back(first_tree(first, h));
      for (auto j = 2; j <= params.k; ++j) {
        family.push_back(attach_leaf(family.back(), first, params.pinch, leaf_label("x", j, params.k), h));
      }
      break;
    }
    case Family_kind::figure1:
    case Family_kind::figure2: {
      auto total = params.k + 1;
      auto heavy = kind == Family_kind::figure2 ? (params.heavy >= 0 ? params.heavy : params.k * params.k) : 0;
      if (kind == Family_kind::figure2 && heavy < 1) {
        throw std::invalid_argument("figure2 needs at least one heavy leaf");
      }
      auto spine_leaf = leaf_label("x", 1, total);
      family.push_back(first_tree(spine_leaf, h));
      auto added_heavy = 0;
      auto add_heavy_until = [&](int target) {
        for (; added_heavy < std::min(target, heavy); ++added_heavy) {
          family.push_back(
              attach_leaf(family.back(), spine_leaf, 0.5 * h, leaf_label("h", added_heavy + 1, heavy), h));
        }
      };
      for (auto i = 1; i <= params.k; ++i) {
        family.push_back(attach_leaf(family.back(), spine_leaf, std::ldexp(h, -i), leaf_label("x", i + 1, total), h));
        add_heavy_until(i * i);
      }
      add_heavy_until(heavy);
      break;
    }
    case Family_kind::random_ultrametric: {
      auto rng = Rng{seed}.split(streams::fixtures);
      auto first = leaf_label("x", 1, params.k);
      family.push_back(first_tree(first, h));
      for (auto j = 2; j <= params.k; ++j) {
        const auto& prev = family.back();
        auto anchor = prev.name(prev.leaves()[rng.index(prev.leaf_count())]);
        auto depth = h * rng.uniform();
        while (depth >= h - 1e-9) {
          depth = h * rng.uniform();
        }
        family.push_back(attach_leaf(prev, anchor, depth, leaf_label("x", j, params.k), h));
      }
      break;
    }
  }
  return family;
}

}  // namespace rootrecon
