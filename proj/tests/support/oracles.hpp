#pragma once

// Brute-force reference computations used only by tests. Each one follows the
// defining formula directly and avoids the library's own algorithms.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "rootrecon/ctmc.hpp"
#include "rootrecon/distribution.hpp"
#include "rootrecon/tree.hpp"

namespace rootrecon::oracle {

using Matrix = std::vector<std::vector<double>>;

// sup over all subsets A of the joint support of a(A) - b(A).
template <typename S>
auto tv_sup_over_subsets(const Distribution<S>& a, const Distribution<S>& b) -> double {
  auto support = std::vector<S>{};
  for (const auto& [s, p] : a) support.push_back(s);
  for (const auto& [s, p] : b) {
    if (a(s) == 0.0) support.push_back(s);
  }
  if (support.size() > 20) throw std::invalid_argument("support too large for subset enumeration");
  auto best = 0.0;
  for (auto mask = std::size_t{0}; mask < (std::size_t{1} << support.size()); ++mask) {
    auto gap = 0.0;
    for (auto i = std::size_t{0}; i < support.size(); ++i) {
      if (mask >> i & 1U) gap += a(support[i]) - b(support[i]);
    }
    best = std::max(best, gap);
  }
  return best;
}

// 1 - sum_s min(a(s), b(s)).
template <typename S>
auto tv_one_minus_min(const Distribution<S>& a, const Distribution<S>& b) -> double {
  auto overlap = 0.0;
  for (const auto& [s, p] : a) overlap += std::min(p, b(s));
  return 1.0 - overlap;
}

// exp(tQ) by Taylor series with scaling and squaring, in long double.
inline auto series_expm(const Rate_matrix& q, double t) -> Matrix {
  auto n = q.size();
  using Ld = std::vector<std::vector<long double>>;
  auto a = Ld(n, std::vector<long double>(n));
  auto norm = 0.0L;
  for (auto i = std::size_t{0}; i < n; ++i) {
    auto row = 0.0L;
    for (auto j = std::size_t{0}; j < n; ++j) {
      a[i][j] = static_cast<long double>(t) * q.rate(static_cast<State>(i), static_cast<State>(j));
      row += std::fabs(a[i][j]);
    }
    norm = std::max(norm, row);
  }
  auto squarings = 0;
  while (norm > 0.25L) {
    norm /= 2;
    ++squarings;
  }
  for (auto& row : a) {
    for (auto& x : row) x = std::ldexp(x, -squarings);
  }
  auto multiply = [n](const Ld& x, const Ld& y) {
    auto z = Ld(n, std::vector<long double>(n, 0.0L));
    for (auto i = std::size_t{0}; i < n; ++i)
      for (auto k = std::size_t{0}; k < n; ++k)
        for (auto j = std::size_t{0}; j < n; ++j) z[i][j] += x[i][k] * y[k][j];
    return z;
  };
  auto result = Ld(n, std::vector<long double>(n, 0.0L));
  auto term = Ld(n, std::vector<long double>(n, 0.0L));
  for (auto i = std::size_t{0}; i < n; ++i) result[i][i] = term[i][i] = 1.0L;
  for (auto k = 1; k <= 30; ++k) {
    term = multiply(term, a);
    for (auto& row : term) {
      for (auto& x : row) x /= k;
    }
    for (auto i = std::size_t{0}; i < n; ++i)
      for (auto j = std::size_t{0}; j < n; ++j) result[i][j] += term[i][j];
  }
  for (auto s = 0; s < squarings; ++s) result = multiply(result, result);
  auto out = Matrix(n, std::vector<double>(n));
  for (auto i = std::size_t{0}; i < n; ++i)
    for (auto j = std::size_t{0}; j < n; ++j) out[i][j] = static_cast<double>(result[i][j]);
  return out;
}

// Joint leaf law by enumerating a state for every non-root vertex and multiplying
// edge transition probabilities. Keys list leaf states in lexicographic leaf order.
inline auto naive_leaf_law(const Tree& tree, const Rate_matrix& q, State root)
    -> std::map<std::vector<State>, double> {
  auto n = static_cast<State>(q.size());
  auto vertices = static_cast<Vertex>(tree.vertex_count());
  auto edge = std::vector<Matrix>(tree.vertex_count());
  for (auto v = Vertex{1}; v < vertices; ++v) edge[v] = series_expm(q, tree.edge_length(v));
  auto states = std::vector<State>(tree.vertex_count(), 0);
  states[0] = root;
  auto law = std::map<std::vector<State>, double>{};
  std::function<void(Vertex)> assign = [&](Vertex v) {
    if (v == vertices) {
      auto p = 1.0;
      for (auto u = Vertex{1}; u < vertices; ++u) p *= edge[u][states[tree.parent(u)]][states[u]];
      auto key = std::vector<State>{};
      for (auto leaf : tree.leaves()) key.push_back(states[leaf]);
      law[key] += p;
      return;
    }
    for (auto s = State{0}; s < n; ++s) {
      states[v] = s;
      assign(v + 1);
    }
  };
  assign(1);
  return law;
}

// Success probability of the best deterministic estimator f: Y -> S, found by
// enumerating all |S|^|Y| functions. prior[s], likelihood[s][y].
inline auto brute_force_optimum(const std::vector<double>& prior, const Matrix& likelihood) -> double {
  auto n_states = prior.size();
  auto n_outcomes = likelihood.front().size();
  auto f = std::vector<std::size_t>(n_outcomes, 0);
  auto best = 0.0;
  while (true) {
    auto success = 0.0;
    for (auto y = std::size_t{0}; y < n_outcomes; ++y) success += prior[f[y]] * likelihood[f[y]][y];
    best = std::max(best, success);
    auto pos = std::size_t{0};
    while (pos < n_outcomes && ++f[pos] == n_states) f[pos++] = 0;
    if (pos == n_outcomes) break;
  }
  return best;
}

// Success probability of the fixed rule y -> rule[y].
inline auto success_probability(const std::vector<double>& prior, const Matrix& likelihood,
                                const std::vector<std::size_t>& rule) -> double {
  auto success = 0.0;
  for (auto y = std::size_t{0}; y < rule.size(); ++y) success += prior[rule[y]] * likelihood[rule[y]][y];
  return success;
}

inline auto binomial(int m, int n) -> double {
  auto c = 1.0;
  for (auto i = 1; i <= n; ++i) c = c * (m - n + i) / i;
  return c;
}

// Majority-vote error on the two-state pinched star with m (odd) leaves.
inline auto pinched_star_majority_error(int m, double q, double s, double h) -> double {
  auto alpha = (1.0 + std::exp(-2.0 * q * s)) / 2.0;
  auto beta = (1.0 - std::exp(-2.0 * q * (h - s))) / 2.0;
  auto sum = 0.0;
  for (auto n = 0; 2 * n < m; ++n) {
    sum += alpha * binomial(m, n) * std::pow(1.0 - beta, n) * std::pow(beta, m - n) +
           (1.0 - alpha) * binomial(m, n) * std::pow(beta, n) * std::pow(1.0 - beta, m - n);
  }
  return sum;
}

inline auto pinched_star_hoeffding(int m, double q, double s, double h) -> double {
  auto alpha = (1.0 + std::exp(-2.0 * q * s)) / 2.0;
  auto beta = (1.0 - std::exp(-2.0 * q * (h - s))) / 2.0;
  return (1.0 - alpha) + alpha * std::exp(-2.0 * m * (0.5 - beta) * (0.5 - beta));
}

// Variance of the number of leaves in state j under a leaf law.
inline auto leaf_count_variance(const std::map<std::vector<State>, double>& law, State j) -> double {
  auto mean = 0.0;
  auto second = 0.0;
  for (const auto& [tuple, p] : law) {
    auto count = 0.0;
    for (auto s : tuple) count += s == j ? 1.0 : 0.0;
    mean += p * count;
    second += p * count * count;
  }
  return second - mean * mean;
}

// Size of the high-mass TKF91 set: whole length classes until the next would
// push the tail below epsilon, then the needed part of that class.
inline auto tkf91_lambda_epsilon_size(double ratio, double epsilon) -> std::size_t {
  auto tail = 1.0;
  auto size = std::size_t{0};
  for (auto length = 0;; ++length) {
    auto per_sequence = (1.0 - ratio) * std::pow(ratio, length) * std::pow(0.25, length);
    auto count = static_cast<std::size_t>(std::llround(std::pow(4.0, length)));
    auto class_mass = per_sequence * static_cast<double>(count);
    if (tail - class_mass < epsilon) {
      auto need = static_cast<std::size_t>(std::floor((tail - epsilon) / per_sequence)) + 1;
      return size + need;
    }
    tail -= class_mass;
    size += count;
  }
}

}  // namespace rootrecon::oracle
