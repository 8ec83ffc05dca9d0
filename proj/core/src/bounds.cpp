#include "rootrecon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "rootrecon/parallel.hpp"

namespace rootrecon {

namespace {

auto finish(double raw, bool condition_ok) -> Bound_value {
  auto out = Bound_value{};
  out.raw = raw;
  out.condition_ok = condition_ok;
  out.clamped = raw > 1.0;
  out.value = condition_ok ? std::min(raw, 1.0) : 1.0;
  return out;
}

void check_inputs(const Bound_inputs& inp) {
  if (!(inp.s >= 0.0)) throw std::invalid_argument("s must be nonnegative");
  if (inp.m < 1) throw std::invalid_argument("m must be at least 1");
  if (!(inp.q_star_epsilon >= 0.0)) throw std::invalid_argument("q_star must be nonnegative");
}

}  // namespace

auto variance_bound(std::size_t leaf_count, double spread, double q_i) -> double {
  if (!(spread >= 0.0) || !(q_i >= 0.0)) {
    throw std::invalid_argument("variance bound inputs must be nonnegative");
  }
  auto m = static_cast<double>(leaf_count);
  return 0.25 * m + 2.0 * std::max(q_i, 1.0) * spread * m * m;
}

auto chebyshev_star_bound(double delta_star, std::size_t m, double q_i, double s) -> Bound_value {
  if (!(delta_star > 0.0)) throw std::invalid_argument("Delta* must be positive");
  if (m < 1) throw std::invalid_argument("m must be at least 1");
  auto raw = 4.0 / (delta_star * delta_star) *
             (1.0 / (4.0 * static_cast<double>(m)) + 2.0 * std::max(q_i, 1.0) * s);
  return finish(raw, true);
}

auto thm2_general_bound(const Bound_inputs& inp) -> Bound_value {
  check_inputs(inp);
  if (!(inp.delta_epsilon > 0.0)) {
    return finish(std::numeric_limits<double>::infinity(), false);
  }
  auto d = inp.delta_epsilon / 8.0;
  auto drift = -std::expm1(-inp.q_star_epsilon * inp.s);
  auto m = static_cast<double>(inp.m);
  auto raw = inp.epsilon + drift / (d * d) +
             static_cast<double>(inp.n_epsilon) * std::exp(-2.0 * d * d * m / (1.0 + d));
  return finish(raw, drift <= inp.delta_epsilon / 4.0);
}

auto prop54_uniform_bound(const Bound_inputs& inp) -> Bound_value {
  check_inputs(inp);
  if (!(inp.f_star > 0.0 && inp.f_star <= 1.0)) throw std::invalid_argument("f_* must lie in (0, 1]");
  auto g = std::min(inp.f_star, inp.delta_q_hstar);
  if (!(g > 0.0)) {
    return finish(std::numeric_limits<double>::infinity(), false);
  }
  auto d = g / 8.0;
  auto drift = -std::expm1(-inp.q_star_epsilon * inp.s);
  auto m = static_cast<double>(inp.m);
  auto raw = drift / (d * d) + 11.0 / inp.f_star * std::exp(-g * g * m / 64.0);
  return finish(raw, drift <= g / 4.0);
}

auto wilson_interval(std::size_t errors, std::size_t trials, double z) -> Error_estimate {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  if (errors > trials) throw std::invalid_argument("more errors than trials");
  auto out = Error_estimate{errors, trials};
  auto n = static_cast<double>(trials);
  auto p = static_cast<double>(errors) / n;
  out.rate = p;
  out.std_error = std::sqrt(p * (1.0 - p) / n);
  auto z2 = z * z;
  auto centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  auto half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  out.ci_low = std::max(0.0, centre - half);
  out.ci_high = std::min(1.0, centre + half);
  return out;
}

auto monte_carlo_error(std::size_t trials, std::uint64_t master_seed, std::size_t threads,
                       const std::function<bool(std::size_t, Rng&)>& is_error) -> Error_estimate {
  if (trials == 0) throw std::invalid_argument("need at least one trial");
  auto outcome = std::vector<char>(trials, 0);
  parallel_for(trials, threads, [&](std::size_t t) {
    auto rng = Rng::for_trial(master_seed, streams::root, t);
    outcome[t] = is_error(t, rng) ? 1 : 0;
  });
  auto errors = static_cast<std::size_t>(std::count(outcome.begin(), outcome.end(), 1));
  return wilson_interval(errors, trials);
}

}  // namespace rootrecon
