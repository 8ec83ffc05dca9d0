#include "rootrecon/tkf91.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <map>
#include <ostream>
#include <queue>
#include <stdexcept>

#include "rootrecon/errors.hpp"
#include "rootrecon/estimators.hpp"
#include "rootrecon/parallel.hpp"
#include "rootrecon/treechain.hpp"

namespace rootrecon {

namespace {

auto draw_letter(const std::array<double, 4>& pi, Rng& rng) -> char {
  auto u = rng.uniform();
  for (auto i = std::size_t{0}; i < 3; ++i) {
    if (u < pi[i]) return nucleotides[i];
    u -= pi[i];
  }
  return nucleotides[3];
}

auto letter_index(char c) -> std::size_t {
  for (auto i = std::size_t{0}; i < nucleotides.size(); ++i) {
    if (nucleotides[i] == c) return i;
  }
  throw std::invalid_argument(std::string{"not a nucleotide: '"} + c + "'");
}

}  // namespace

void Tkf91_params::validate() const {
  if (!(nu > 0.0 && std::isfinite(nu))) throw std::invalid_argument("nu must be positive");
  if (!(lambda > 0.0 && std::isfinite(lambda))) throw std::invalid_argument("lambda must be positive");
  if (!(mu > 0.0 && std::isfinite(mu))) throw std::invalid_argument("mu must be positive");
  if (!(lambda < mu)) throw std::invalid_argument("lambda must be < mu");
  auto total = 0.0;
  for (auto p : pi) {
    if (!(p >= 0.0)) throw std::invalid_argument("nucleotide frequencies must be nonnegative");
    total += p;
  }
  if (!(std::abs(total - 1.0) <= 1e-12)) throw std::invalid_argument("nucleotide frequencies must sum to 1");
}

auto operator<<(std::ostream& os, const Tkf91_sequence& seq) -> std::ostream& {
  return os << (seq.letters.empty() ? std::string{"-"} : seq.letters);
}

auto tkf91_evolve(const Tkf91_params& params, Tkf91_sequence seq, double t, Rng& rng) -> Tkf91_sequence {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be nonnegative");
  auto& x = seq.letters;
  auto clock = 0.0;
  while (true) {
    auto m = static_cast<double>(x.size());
    auto substitution = m * params.nu;
    auto deletion = m * params.mu;
    auto total = substitution + deletion + (m + 1.0) * params.lambda;
    clock += rng.exponential(total);
    if (clock > t) break;
    auto u = rng.uniform() * total;
    if (u < substitution) {
      x[rng.index(x.size())] = draw_letter(params.pi, rng);
    } else if (u < substitution + deletion) {
      // Site indices here exclude the immortal link, so it can never be removed.
      x.erase(rng.index(x.size()), 1);
    } else {
      // Parent site 0 is the immortal link; the child lands right after its parent.
      auto parent = rng.index(x.size() + 1);
      x.insert(x.begin() + static_cast<std::ptrdiff_t>(parent), draw_letter(params.pi, rng));
      if (x.size() > tkf91_length_cap) {
        throw Guard_violation("TKF91 sequence length exceeded " + std::to_string(tkf91_length_cap));
      }
    }
  }
  return seq;
}

auto stationary_sample(const Tkf91_params& params, Rng& rng) -> Tkf91_sequence {
  params.validate();
  auto length = rng.geometric(1.0 - params.ratio());
  if (length > tkf91_length_cap) {
    throw Guard_violation("stationary TKF91 length exceeded " + std::to_string(tkf91_length_cap));
  }
  auto seq = Tkf91_sequence{};
  seq.letters.reserve(length);
  for (auto i = std::uint64_t{0}; i < length; ++i) {
    seq.letters.push_back(draw_letter(params.pi, rng));
  }
  return seq;
}

auto stationary_length_pmf(const Tkf91_params& params, std::size_t length) -> double {
  params.validate();
  auto r = params.ratio();
  return (1.0 - r) * std::pow(r, static_cast<double>(length));
}

auto stationary_pmf(const Tkf91_params& params, const Tkf91_sequence& seq) -> double {
  // Multiply per-letter powers so that sequences with equal letter counts get
  // bitwise-equal masses.
  auto counts = std::array<std::size_t, 4>{};
  for (auto c : seq.letters) ++counts[letter_index(c)];
  auto p = stationary_length_pmf(params, seq.size());
  for (auto i = std::size_t{0}; i < 4; ++i) {
    if (counts[i] > 0) p *= std::pow(params.pi[i], static_cast<double>(counts[i]));
  }
  return p;
}

auto tkf91_lambda_epsilon(const Tkf91_params& params, double epsilon, std::size_t limit)
    -> std::vector<Tkf91_sequence> {
  params.validate();
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  struct Entry {
    double mass;
    Tkf91_sequence seq;
  };
  // Appending a letter multiplies the mass by (lambda/mu) pi < 1, so each sequence is
  // strictly lighter than its prefix and a best-first search visits masses in order.
  auto heavier_first = [](const Entry& a, const Entry& b) {
    auto scale = std::max(a.mass, b.mass);
    if (std::abs(a.mass - b.mass) > 1e-12 * scale) return a.mass < b.mass;
    return b.seq < a.seq;
  };
  auto queue = std::priority_queue<Entry, std::vector<Entry>, decltype(heavier_first)>{heavier_first};
  queue.push({stationary_pmf(params, {}), {}});
  auto out = std::vector<Tkf91_sequence>{};
  auto covered = 0.0;
  while (!(1.0 - covered < epsilon)) {
    if (out.size() >= limit) {
      throw Guard_violation("high-mass TKF91 set exceeds " + std::to_string(limit) + " sequences");
    }
    auto top = queue.top();
    queue.pop();
    covered += top.mass;
    for (auto i = std::size_t{0}; i < 4; ++i) {
      if (params.pi[i] <= 0.0) continue;
      auto child = Tkf91_sequence{top.seq.letters + nucleotides[i]};
      queue.push({stationary_pmf(params, child), std::move(child)});
    }
    out.push_back(std::move(top.seq));
  }
  return out;
}

Tkf91_process::Tkf91_process(Tkf91_params params) : params_{params} { params_.validate(); }

auto tkf91_root_experiment(const Indexed_trees& trees, const Tkf91_params& params,
                           const Tkf91_experiment_settings& settings) -> std::vector<Tkf91_experiment_row> {
  auto process = Tkf91_process{params};
  auto candidates = tkf91_lambda_epsilon(params, settings.epsilon);

  auto rows = std::map<Tkf91_sequence, Distribution<Tkf91_sequence>>{};
  auto estimated = std::vector<std::optional<Distribution<Tkf91_sequence>>>(candidates.size());
  parallel_for(candidates.size(), settings.threads, [&](std::size_t c) {
    auto rng = Rng::for_trial(settings.seed, streams::plug_in_rows, c);
    estimated[c] = monte_carlo_row<Tkf91_sequence>(process, candidates[c], settings.h_star, settings.row_samples, rng);
  });
  for (auto c = std::size_t{0}; c < candidates.size(); ++c) {
    rows.emplace(candidates[c], std::move(*estimated[c]));
  }
  auto test = Frequency_test<Tkf91_sequence>{candidates, rows};

  auto out = std::vector<Tkf91_experiment_row>{};
  for (const auto& [k, tree] : trees) {
    auto plan = plan_stretch(tree, settings.s, settings.h_star);
    auto error = std::vector<char>(settings.trials, 0);
    auto fallback = std::vector<char>(settings.trials, 0);
    parallel_for(settings.trials, settings.threads, [&](std::size_t t) {
      auto trial = derive_seed(settings.seed, k, t);
      auto root_rng = Rng::for_trial(trial, streams::root, 0);
      auto chain_rng = Rng::for_trial(trial, streams::tree_chain, 0);
      auto estimator_rng = Rng::for_trial(trial, streams::estimator, 0);
      auto root = stationary_sample(params, root_rng);
      auto leaves = simulate<Tkf91_sequence>(tree, process, root, chain_rng);
      auto report = frequency_estimate(plan, test, process, leaves, estimator_rng);
      error[t] = report.estimate == root ? 0 : 1;
      fallback[t] = report.fallback ? 1 : 0;
    });
    auto row = Tkf91_experiment_row{};
    row.k = k;
    row.leaves = tree.leaf_count();
    row.m = plan.info.m;
    row.candidates = candidates.size();
    row.delta = test.delta();
    row.error = wilson_interval(static_cast<std::size_t>(std::count(error.begin(), error.end(), 1)), settings.trials);
    row.fallbacks = static_cast<std::size_t>(std::count(fallback.begin(), fallback.end(), 1));
    out.push_back(row);
  }
  return out;
}

void write_tkf91_csv(std::ostream& os, const std::vector<Tkf91_experiment_row>& rows) {
  os << "k,leaves,m,candidates,delta,errors,trials,error,ci_low,ci_high,fallbacks\n";
  auto old = os.precision(10);
  for (const auto& r : rows) {
    os << r.k << ',' << r.leaves << ',' << r.m << ',' << r.candidates << ',' << r.delta << ',' << r.error.errors
       << ',' << r.error.trials << ',' << r.error.rate << ',' << r.error.ci_low << ',' << r.error.ci_high << ','
       << r.fallbacks << '\n';
  }
  os.precision(old);
}

}  // namespace rootrecon
