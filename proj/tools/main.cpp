// Command-line front end: simulate, estimate, bounds, experiment, tkf91, validate.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "rootrecon/bounds.hpp"
#include "rootrecon/config.hpp"
#include "rootrecon/errors.hpp"
#include "rootrecon/estimators.hpp"
#include "rootrecon/experiment.hpp"
#include "rootrecon/tkf91.hpp"
#include "rootrecon/treechain.hpp"

namespace {

using namespace rootrecon;

constexpr int exit_config_error = 2;
constexpr int exit_guard_violation = 3;

auto split(const std::string& text, char sep) -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  auto item = std::string{};
  auto in = std::istringstream{text};
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

auto parse_doubles(const std::string& text, const std::string& what) -> std::vector<double> {
  auto out = std::vector<double>{};
  for (const auto& item : split(text, ',')) {
    try {
      auto used = std::size_t{0};
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Config_error(what + ": cannot parse '" + item + "'");
    }
  }
  return out;
}

auto print(double x) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void print_bound(const std::string& name, const Bound_value& b) {
  std::cout << name << ' ' << print(b.value) << " (raw " << print(b.raw) << (b.condition_ok ? "" : ", condition fails")
            << (b.clamped ? ", clamped" : "") << ")\n";
}

auto read_observations(const std::string& path) -> Leaf_assignment<State> {
  auto in = std::ifstream{path};
  if (!in) throw Config_error("cannot open observation file '" + path + "'");
  auto out = Leaf_assignment<State>{};
  auto line = std::string{};
  while (std::getline(in, line)) {
    if (line.empty() || line == "leaf,state") continue;
    auto fields = split(line, ',');
    if (fields.size() != 2) throw Config_error("observation file: expected 'leaf,state' lines");
    out[fields[0]] = std::stoi(fields[1]);
  }
  return out;
}

auto load(const std::string& path, std::size_t threads, const std::string& output) -> Experiment_config {
  auto config = load_config(path);
  if (threads > 0) config.threads = threads;
  if (!output.empty()) config.output = output;
  return config;
}

void emit(const Experiment_config& config, const Experiment_result& result) {
  if (config.output.empty()) {
    write_summary_csv(std::cout, result);
  } else {
    write_experiment_files(config.output, result);
    std::cout << "wrote " << config.output << ".trials.csv and " << config.output << ".summary.csv\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  auto app = CLI::App{"Root-state reconstruction for Markov chains on trees"};
  app.require_subcommand(1);

  auto config_path = std::string{};
  auto threads = std::size_t{0};
  auto output = std::string{};

  auto* simulate_cmd = app.add_subcommand("simulate", "Simulate leaf states on one tree of the family");
  auto k = std::size_t{1};
  auto root = std::string{"0"};
  auto seed = std::uint64_t{1};
  simulate_cmd->add_option("-c,--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("-k", k, "Family index (1-based)");
  simulate_cmd->add_option("--root", root, "Root state (integer, or a sequence for tkf91; '-' is empty)");
  simulate_cmd->add_option("--seed", seed, "Seed");

  auto* estimate_cmd = app.add_subcommand("estimate", "Estimate the root from observed leaf states");
  auto observations = std::string{};
  estimate_cmd->add_option("-c,--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  estimate_cmd->add_option("-o,--observations", observations, "CSV of leaf,state")->required();
  estimate_cmd->add_option("-k", k, "Family index (1-based)");
  estimate_cmd->add_option("--seed", seed, "Seed for the randomized estimators");

  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate closed-form bounds");
  bounds_cmd->require_subcommand(1);
  auto prior_text = std::string{};
  auto row_texts = std::vector<std::string>{};
  auto candidates_text = std::string{};
  auto* recon_cmd = bounds_cmd->add_subcommand("recon", "Reconstruction sandwich for a finite channel");
  recon_cmd->add_option("--prior", prior_text, "Prior masses, comma separated")->required();
  recon_cmd->add_option("--row", row_texts, "Conditional law of one prior state, comma separated; repeat in state order")
      ->required();
  recon_cmd->add_option("--candidates", candidates_text, "Candidate states for the lower bound (default: all)");

  auto inp = Bound_inputs{};
  auto* thm2_cmd = bounds_cmd->add_subcommand("thm2", "General-chain error bound");
  thm2_cmd->add_option("--epsilon", inp.epsilon)->required();
  thm2_cmd->add_option("--n-epsilon", inp.n_epsilon)->required();
  thm2_cmd->add_option("--delta", inp.delta_epsilon)->required();
  thm2_cmd->add_option("--q-star", inp.q_star_epsilon)->required();
  thm2_cmd->add_option("--s", inp.s)->required();
  thm2_cmd->add_option("--m", inp.m)->required();
  auto* prop54_cmd = bounds_cmd->add_subcommand("prop54", "Uniform-chain minimax error bound");
  prop54_cmd->add_option("--f-star", inp.f_star)->required();
  prop54_cmd->add_option("--delta", inp.delta_q_hstar)->required();
  prop54_cmd->add_option("--q-star", inp.q_star_epsilon)->required();
  prop54_cmd->add_option("--s", inp.s)->required();
  prop54_cmd->add_option("--m", inp.m)->required();
  auto m = std::size_t{1};
  auto spread_value = 0.0;
  auto q_i = 1.0;
  auto delta_star = 0.0;
  auto s = 0.0;
  auto* variance_cmd = bounds_cmd->add_subcommand("variance", "Leaf-count variance bound");
  variance_cmd->add_option("--m", m)->required();
  variance_cmd->add_option("--spread", spread_value)->required();
  variance_cmd->add_option("--q", q_i)->required();
  auto* chebyshev_cmd = bounds_cmd->add_subcommand("chebyshev", "Star-norm deviation bound");
  chebyshev_cmd->add_option("--delta-star", delta_star)->required();
  chebyshev_cmd->add_option("--m", m)->required();
  chebyshev_cmd->add_option("--q", q_i)->required();
  chebyshev_cmd->add_option("--s", s)->required();

  auto* experiment_cmd = app.add_subcommand("experiment", "Run a Monte Carlo experiment from a config");
  experiment_cmd->add_option("-c,--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("-t,--threads", threads, "Worker threads (default: ROOTRECON_THREADS or all cores)");
  experiment_cmd->add_option("--output", output, "CSV path prefix (overrides the config)");

  auto* tkf91_cmd = app.add_subcommand("tkf91", "Run the TKF91 root-reconstruction experiment");
  tkf91_cmd->add_option("-c,--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);
  tkf91_cmd->add_option("-t,--threads", threads, "Worker threads");
  tkf91_cmd->add_option("--output", output, "CSV path prefix (overrides the config)");

  auto* validate_cmd = app.add_subcommand("validate", "Check a config without running it");
  validate_cmd->add_option("-c,--config", config_path, "Experiment config")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    auto code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  try {
    if (simulate_cmd->parsed()) {
      auto config = load_config(config_path);
      auto tree = experiment_tree(config, k);
      auto rng = Rng::for_trial(seed, streams::tree_chain, 0);
      std::cout << "leaf,state\n";
      if (config.process == Process_kind::tkf91) {
        auto process = Tkf91_process{config.tkf91};
        auto start = Tkf91_sequence{root == "-" ? std::string{} : root};
        for (const auto& [leaf, state] : simulate<Tkf91_sequence>(tree, process, start, rng)) {
          std::cout << leaf << ',' << state << '\n';
        }
      } else {
        auto process = Ctmc_process{build_rate_matrix(config)};
        for (const auto& [leaf, state] : simulate<State>(tree, process, std::stoi(root), rng)) {
          std::cout << leaf << ',' << state << '\n';
        }
      }
    } else if (estimate_cmd->parsed()) {
      auto config = load_config(config_path);
      auto tree = experiment_tree(config, k);
      auto q = build_rate_matrix(config);
      auto process = Ctmc_process{q};
      auto leaves = read_observations(observations);
      auto rng = Rng::for_trial(seed, streams::estimator, 0);
      auto n = q.size();
      auto prior_masses = Distribution<State>::Map{};
      for (auto i = std::size_t{0}; i < n; ++i) prior_masses.emplace(static_cast<State>(i), 1.0 / static_cast<double>(n));
      auto prior = Distribution<State>{prior_masses};
      auto rows = std::map<State, Distribution<State>>{};
      auto p = transition_matrix(q, config.h_star);
      for (auto i = std::size_t{0}; i < n; ++i) rows.emplace(static_cast<State>(i), p.row(static_cast<State>(i)));
      auto report = Estimator_report<State>{};
      switch (config.estimator) {
        case Estimator_kind::map: {
          auto laws = std::map<State, Leaf_law>{};
          for (auto i = std::size_t{0}; i < n; ++i) laws.emplace(static_cast<State>(i), exact_leaf_law(tree, q, static_cast<State>(i)));
          report.estimate = map_estimate(laws, prior, to_leaf_tuple(tree, leaves));
          break;
        }
        case Estimator_kind::frequency:
          report = frequency_estimate(tree, process, leaves, config.s, config.h_star,
                                      high_mass_states(prior, config.epsilon), rows, rng);
          break;
        case Estimator_kind::uniform: {
          auto cache = Row_cache<State>{[&](const State& i) { return rows.at(i); }};
          report = uniform_chain_estimate(tree, process, leaves, config.s, config.h_star, q.q_star(), cache, rng);
          break;
        }
        case Estimator_kind::majority:
          report.estimate = majority_estimate(leaves);
          break;
      }
      std::cout << "estimate," << report.estimate << "\nfallback," << (report.fallback ? 1 : 0) << "\nmargin,"
                << print(report.margin) << "\nm," << report.restriction.m << "\nspread,"
                << print(report.restriction.spread) << '\n';
    } else if (recon_cmd->parsed()) {
      auto prior_values = parse_doubles(prior_text, "--prior");
      auto prior_masses = Distribution<State>::Map{};
      for (auto i = std::size_t{0}; i < prior_values.size(); ++i) prior_masses.emplace(static_cast<State>(i), prior_values[i]);
      auto prior = Distribution<State>{prior_masses};
      if (row_texts.size() != prior_values.size()) throw Config_error("--row: need one row per prior state");
      auto conditionals = std::map<State, Distribution<State>>{};
      for (auto i = std::size_t{0}; i < row_texts.size(); ++i) {
        auto values = parse_doubles(row_texts[i], "--row");
        auto masses = Distribution<State>::Map{};
        for (auto j = std::size_t{0}; j < values.size(); ++j) masses.emplace(static_cast<State>(j), values[j]);
        conditionals.emplace(static_cast<State>(i), Distribution<State>{masses});
      }
      auto candidates = std::set<State>{};
      if (candidates_text.empty()) {
        for (auto i = std::size_t{0}; i < prior_values.size(); ++i) candidates.insert(static_cast<State>(i));
      } else {
        for (auto v : parse_doubles(candidates_text, "--candidates")) candidates.insert(static_cast<State>(v));
      }
      std::cout << "upper " << print(recon_upper(prior, conditionals)) << '\n';
      std::cout << "lower " << print(recon_lower(prior, conditionals, candidates)) << '\n';
    } else if (thm2_cmd->parsed()) {
      print_bound("thm2", thm2_general_bound(inp));
    } else if (prop54_cmd->parsed()) {
      print_bound("prop54", prop54_uniform_bound(inp));
    } else if (variance_cmd->parsed()) {
      std::cout << "variance " << print(variance_bound(m, spread_value, q_i)) << '\n';
    } else if (chebyshev_cmd->parsed()) {
      print_bound("chebyshev", chebyshev_star_bound(delta_star, m, q_i, s));
    } else if (experiment_cmd->parsed()) {
      auto config = load(config_path, threads, output);
      emit(config, run_experiment(config));
    } else if (tkf91_cmd->parsed()) {
      auto config = load(config_path, threads, output);
      if (config.process != Process_kind::tkf91) throw Config_error("key 'process.kind': must be tkf91");
      emit(config, run_experiment(config));
    } else if (validate_cmd->parsed()) {
      auto violations = validate(load_config(config_path));
      for (const auto& v : violations) std::cout << v << '\n';
      if (!violations.empty()) return exit_config_error;
      std::cout << "ok\n";
    }
  } catch (const Config_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const Guard_violation& e) {
    std::cerr << "guard violation: " << e.what() << '\n';
    return exit_guard_violation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
