#include "rootrecon/ctmc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace rootrecon {

Rate_matrix::Rate_matrix(std::size_t n, std::vector<double> entries) : n_{n}, q_{std::move(entries)} {
  if (n_ == 0 || q_.size() != n_ * n_) {
    throw std::invalid_argument("rate matrix must be square and nonempty");
  }
  for (auto i = std::size_t{0}; i < n_; ++i) {
    auto sum = 0.0;
    auto scale = 0.0;
    for (auto j = std::size_t{0}; j < n_; ++j) {
      auto r = q_[i * n_ + j];
      if (!std::isfinite(r)) {
        throw std::invalid_argument("rate matrix entries must be finite");
      }
      if (i != j && r < 0.0) {
        throw std::invalid_argument("off-diagonal rates must be nonnegative (row " + std::to_string(i) + ")");
      }
      sum += r;
      scale += std::abs(r);
    }
    if (std::abs(sum) > 1e-9 * std::max(1.0, scale)) {
      throw std::invalid_argument("rate matrix row " + std::to_string(i) + " does not sum to 0");
    }
  }
}

auto Rate_matrix::from_off_diagonal(std::size_t n, std::vector<double> entries) -> Rate_matrix {
  if (entries.size() != n * n) {
    throw std::invalid_argument("rate matrix must be square");
  }
  for (auto i = std::size_t{0}; i < n; ++i) {
    auto out = 0.0;
    for (auto j = std::size_t{0}; j < n; ++j) {
      if (i != j) {
        out += entries[i * n + j];
      }
    }
    entries[i * n + i] = -out;
  }
  return Rate_matrix{n, std::move(entries)};
}

auto Rate_matrix::max_exit_rate() const -> double {
  auto m = 0.0;
  for (auto i = State{0}; i < static_cast<State>(n_); ++i) {
    m = std::max(m, exit_rate(i));
  }
  return m;
}

auto Rate_matrix::norm() const -> double {
  auto m = 0.0;
  for (auto i = std::size_t{0}; i < n_; ++i) {
    auto row = 0.0;
    for (auto j = std::size_t{0}; j < n_; ++j) {
      row += std::abs(q_[i * n_ + j]);
    }
    m = std::max(m, row);
  }
  return m;
}

auto Rate_matrix::q_star() const -> double { return std::max(1.0, max_exit_rate()); }

auto two_state_chain(double q) -> Rate_matrix { return Rate_matrix{2, {-q, q, q, -q}}; }

auto uniform_chain(std::size_t n, double rate) -> Rate_matrix {
  return Rate_matrix::from_off_diagonal(n, std::vector<double>(n * n, rate));
}

auto parse_rate_matrix(const std::string& text) -> Rate_matrix {
  auto rows = std::vector<std::vector<double>>{};
  auto in = std::istringstream{text};
  auto line = std::string{};
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    auto fields = std::istringstream{line};
    auto row = std::vector<double>{};
    auto token = std::string{};
    while (fields >> token) {
      try {
        auto used = std::size_t{};
        row.push_back(std::stod(token, &used));
        if (used != token.size()) {
          throw std::invalid_argument(token);
        }
      } catch (const std::exception&) {
        throw std::invalid_argument("rate matrix: bad number '" + token + "'");
      }
    }
    rows.push_back(std::move(row));
  }
  auto n = rows.size();
  auto flat = std::vector<double>{};
  for (const auto& row : rows) {
    if (row.size() != n) {
      throw std::invalid_argument("rate matrix: every row needs " + std::to_string(n) + " entries");
    }
    flat.insert(flat.end(), row.begin(), row.end());
  }
  return Rate_matrix{n, std::move(flat)};
}

auto read_rate_matrix_file(const std::string& path) -> Rate_matrix {
  auto in = std::ifstream{path};
  if (!in) {
    throw std::runtime_error("cannot open rate matrix file '" + path + "'");
  }
  auto buffer = std::stringstream{};
  buffer << in.rdbuf();
  return parse_rate_matrix(buffer.str());
}

auto Transition_matrix::row(State i) const -> Distribution<State> {
  auto masses = Distribution<State>::Map{};
  auto values = row_values(i);
  for (auto j = std::size_t{0}; j < n_; ++j) {
    if (values[j] > 0.0) {
      masses.emplace(static_cast<State>(j), values[j]);
    }
  }
  return Distribution<State>{std::move(masses)};
}

namespace {

auto multiply(const std::vector<double>& a, const std::vector<double>& b, std::size_t n) -> std::vector<double> {
  auto c = std::vector<double>(n * n, 0.0);
  for (auto i = std::size_t{0}; i < n; ++i) {
    for (auto k = std::size_t{0}; k < n; ++k) {
      auto aik = a[i * n + k];
      if (aik == 0.0) {
        continue;
      }
      for (auto j = std::size_t{0}; j < n; ++j) {
        c[i * n + j] += aik * b[k * n + j];
      }
    }
  }
  return c;
}

void renormalize_rows(std::vector<double>& p, std::size_t n, double tol) {
  for (auto i = std::size_t{0}; i < n; ++i) {
    auto sum = 0.0;
    for (auto j = std::size_t{0}; j < n; ++j) {
      p[i * n + j] = std::max(0.0, p[i * n + j]);
      sum += p[i * n + j];
    }
    if (std::abs(sum - 1.0) > tol + 1e-13) {
      throw std::runtime_error("uniformization row sum off by " + std::to_string(std::abs(sum - 1.0)));
    }
    for (auto j = std::size_t{0}; j < n; ++j) {
      p[i * n + j] /= sum;
    }
  }
}

constexpr double max_poisson_mean = 8.0;

}  // namespace

auto transition_matrix(const Rate_matrix& q, double t, double tol) -> Transition_matrix {
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw std::invalid_argument("transition time must be finite and nonnegative");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("uniformization tolerance must be positive");
  }
  auto n = q.size();
  auto identity = std::vector<double>(n * n, 0.0);
  for (auto i = std::size_t{0}; i < n; ++i) {
    identity[i * n + i] = 1.0;
  }
  auto rate = q.max_exit_rate();
  if (t == 0.0 || rate == 0.0) {
    return Transition_matrix{n, std::move(identity)};
  }

  auto halvings = 0;
  while (rate * std::ldexp(t, -halvings) > max_poisson_mean) {
    ++halvings;
  }
  auto mean = rate * std::ldexp(t, -halvings);
  auto step_tol = std::ldexp(tol, -halvings);

  // Jump chain B = I + Q / rate.
  auto jump = identity;
  for (auto i = std::size_t{0}; i < n; ++i) {
    for (auto j = std::size_t{0}; j < n; ++j) {
      jump[i * n + j] += q.entries()[i * n + j] / rate;
    }
  }

  auto weight = std::exp(-mean);
  auto power = identity;
  auto result = std::vector<double>(n * n, 0.0);
  for (auto k = 0;; ++k) {
    for (auto e = std::size_t{0}; e < n * n; ++e) {
      result[e] += weight * power[e];
    }
    auto next_weight = weight * mean / (k + 1);
    // Poisson tail beyond k is at most next_weight / (1 - mean/(k+2)) once k+2 > mean.
    if (k + 2 > mean && next_weight / (1.0 - mean / (k + 2)) < step_tol) {
      break;
    }
    if (k > 10000) {
      throw std::runtime_error("uniformization did not converge");
    }
    weight = next_weight;
    power = multiply(power, jump, n);
  }
  renormalize_rows(result, n, step_tol);

  for (auto h = 0; h < halvings; ++h) {
    result = multiply(result, result, n);
    renormalize_rows(result, n, tol);
  }
  return Transition_matrix{n, std::move(result)};
}

auto identifiability_margin(const Rate_matrix& q, double t, std::span<const State> subset) -> double {
  if (!(t > 0.0)) {
    throw std::invalid_argument("identifiability margin needs t > 0");
  }
  if (subset.size() < 2) {
    return std::numeric_limits<double>::infinity();
  }
  auto p = transition_matrix(q, t);
  auto margin = std::numeric_limits<double>::infinity();
  for (auto a = std::size_t{0}; a < subset.size(); ++a) {
    for (auto b = a + 1; b < subset.size(); ++b) {
      if (subset[a] == subset[b]) {
        continue;
      }
      margin = std::min(margin, total_variation(p.row(subset[a]), p.row(subset[b])));
    }
  }
  return margin;
}

auto sample_endpoint(const Rate_matrix& q, State start, double t, Rng& rng) -> State {
  if (!(t >= 0.0)) {
    throw std::invalid_argument("simulation time must be nonnegative");
  }
  auto state = start;
  auto n = static_cast<State>(q.size());
  auto clock = 0.0;
  while (true) {
    auto out = q.exit_rate(state);
    if (out <= 0.0) {
      return state;
    }
    clock += rng.exponential(out);
    if (clock > t) {
      return state;
    }
    auto target = rng.uniform() * out;
    auto next = state;
    for (auto j = State{0}; j < n; ++j) {
      if (j == state || q.rate(state, j) <= 0.0) {
        continue;
      }
      next = j;
      target -= q.rate(state, j);
      if (target < 0.0) {
        break;
      }
    }
    state = next;
  }
}

auto star_norm(std::span<const double> v) -> double {
  auto sum = 0.0;
  auto weight = 0.5;
  for (auto x : v) {
    sum += weight * std::abs(x);
    weight *= 0.5;
  }
  return sum;
}

auto f_star(double q_star, double h_star) -> double { return std::exp(-q_star * h_star); }

}  // namespace rootrecon
