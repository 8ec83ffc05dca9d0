#include "rootrecon/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "rootrecon/ctmc.hpp"
#include "rootrecon/errors.hpp"
#include "rootrecon/newick.hpp"

namespace rootrecon {

namespace {

auto trim(std::string_view s) -> std::string_view {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

auto split_list(std::string_view s) -> std::vector<std::string_view> {
  auto out = std::vector<std::string_view>{};
  while (true) {
    auto comma = s.find(',');
    out.push_back(trim(s.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

template <typename T>
auto parse_number(std::string_view key, std::string_view value) -> T {
  auto out = T{};
  auto [end, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || end != value.data() + value.size()) {
    throw Config_error("key '" + std::string{key} + "': cannot parse '" + std::string{value} + "'");
  }
  return out;
}

auto parse_positive(std::string_view key, std::string_view value) -> double {
  auto x = parse_number<double>(key, value);
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Config_error("key '" + std::string{key} + "': must be positive");
  }
  return x;
}

auto parse_nonnegative(std::string_view key, std::string_view value) -> double {
  auto x = parse_number<double>(key, value);
  if (!(x >= 0.0) || !std::isfinite(x)) {
    throw Config_error("key '" + std::string{key} + "': must be nonnegative");
  }
  return x;
}

auto format_double(double x) -> std::string {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

auto parse_process_kind(std::string_view name) -> Process_kind {
  if (name == "two_state") return Process_kind::two_state;
  if (name == "uniform") return Process_kind::uniform;
  if (name == "matrix") return Process_kind::matrix;
  if (name == "tkf91") return Process_kind::tkf91;
  throw std::invalid_argument("unknown process kind '" + std::string{name} + "'");
}

auto parse_estimator_kind(std::string_view name) -> Estimator_kind {
  if (name == "map") return Estimator_kind::map;
  if (name == "frequency") return Estimator_kind::frequency;
  if (name == "uniform") return Estimator_kind::uniform;
  if (name == "majority") return Estimator_kind::majority;
  throw std::invalid_argument("unknown estimator kind '" + std::string{name} + "'");
}

auto to_string(Process_kind kind) -> std::string {
  switch (kind) {
    case Process_kind::two_state: return "two_state";
    case Process_kind::uniform: return "uniform";
    case Process_kind::matrix: return "matrix";
    case Process_kind::tkf91: return "tkf91";
  }
  return "?";
}

auto to_string(Estimator_kind kind) -> std::string {
  switch (kind) {
    case Estimator_kind::map: return "map";
    case Estimator_kind::frequency: return "frequency";
    case Estimator_kind::uniform: return "uniform";
    case Estimator_kind::majority: return "majority";
  }
  return "?";
}

auto Experiment_config::effective_k_values() const -> std::vector<std::size_t> {
  if (!k_values.empty()) return k_values;
  return {static_cast<std::size_t>(family.k)};
}

auto parse_config(std::string_view text) -> Experiment_config {
  auto config = Experiment_config{};
  auto seen = std::map<std::string, int>{};
  auto line_no = 0;
  auto stream = std::istringstream{std::string{text}};
  auto line = std::string{};
  while (std::getline(stream, line)) {
    ++line_no;
    auto view = std::string_view{line};
    if (auto hash = view.find('#'); hash != std::string_view::npos) view = view.substr(0, hash);
    view = trim(view);
    if (view.empty()) continue;
    auto eq = view.find('=');
    if (eq == std::string_view::npos) {
      throw Config_error("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    auto key = std::string{trim(view.substr(0, eq))};
    auto value = trim(view.substr(eq + 1));
    if (value.empty()) throw Config_error("key '" + key + "': missing value");
    if (!seen.emplace(key, line_no).second) throw Config_error("key '" + key + "': given twice");

    auto kind_error = [&](const std::exception& e) { return Config_error("key '" + key + "': " + e.what()); };
    if (key == "family.kind") {
      if (value == "file") {
        config.family_kind.reset();
      } else {
        try {
          config.family_kind = parse_family_kind(value);
        } catch (const std::invalid_argument& e) {
          throw kind_error(e);
        }
      }
    } else if (key == "family.file") {
      config.family_file = std::string{value};
    } else if (key == "family.k") {
      config.family.k = parse_number<int>(key, value);
      if (config.family.k < 1) throw Config_error("key 'family.k': must be at least 1");
    } else if (key == "family.height") {
      config.family.height = parse_positive(key, value);
    } else if (key == "family.pinch") {
      config.family.pinch = parse_positive(key, value);
    } else if (key == "family.heavy") {
      config.family.heavy = parse_number<int>(key, value);
    } else if (key == "family.seed") {
      config.family_seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "experiment.k") {
      for (auto item : split_list(value)) {
        auto k = parse_number<std::size_t>(key, item);
        if (k < 1) throw Config_error("key 'experiment.k': entries must be at least 1");
        config.k_values.push_back(k);
      }
    } else if (key == "process.kind") {
      try {
        config.process = parse_process_kind(value);
      } catch (const std::invalid_argument& e) {
        throw kind_error(e);
      }
    } else if (key == "process.q") {
      config.q = parse_nonnegative(key, value);
    } else if (key == "process.states") {
      config.states = parse_number<std::size_t>(key, value);
      if (config.states < 2) throw Config_error("key 'process.states': must be at least 2");
    } else if (key == "process.rate") {
      config.rate = parse_nonnegative(key, value);
    } else if (key == "process.file") {
      config.matrix_file = std::string{value};
    } else if (key == "tkf91.lambda") {
      config.tkf91.lambda = parse_positive(key, value);
    } else if (key == "tkf91.mu") {
      config.tkf91.mu = parse_positive(key, value);
    } else if (key == "tkf91.nu") {
      config.tkf91.nu = parse_positive(key, value);
    } else if (key == "tkf91.pi") {
      auto items = split_list(value);
      if (items.size() != 4) throw Config_error("key 'tkf91.pi': expected four frequencies (A,C,G,T)");
      for (auto i = std::size_t{0}; i < 4; ++i) config.tkf91.pi[i] = parse_nonnegative(key, items[i]);
    } else if (key == "estimator.kind") {
      try {
        config.estimator = parse_estimator_kind(value);
      } catch (const std::invalid_argument& e) {
        throw kind_error(e);
      }
    } else if (key == "estimator.epsilon") {
      config.epsilon = parse_positive(key, value);
    } else if (key == "estimator.s") {
      config.s = parse_number<double>(key, value);
    } else if (key == "estimator.h_star") {
      config.h_star = parse_positive(key, value);
    } else if (key == "estimator.row_samples") {
      config.row_samples = parse_number<std::size_t>(key, value);
      if (config.row_samples < 1) throw Config_error("key 'estimator.row_samples': must be at least 1");
    } else if (key == "root") {
      if (value == "prior") {
        config.fixed_root.reset();
      } else {
        config.fixed_root = parse_number<int>(key, value);
      }
    } else if (key == "trials") {
      config.trials = parse_number<std::size_t>(key, value);
      if (config.trials < 1) throw Config_error("key 'trials': must be at least 1");
    } else if (key == "seed") {
      config.seed = parse_number<std::uint64_t>(key, value);
    } else if (key == "threads") {
      config.threads = parse_number<std::size_t>(key, value);
    } else if (key == "output") {
      config.output = std::string{value};
    } else {
      throw Config_error("unknown key '" + key + "'");
    }
  }
  if (!config.family_kind && config.family_file.empty()) {
    throw Config_error("key 'family.file': required when family.kind = file");
  }
  if (config.process == Process_kind::matrix && config.matrix_file.empty()) {
    throw Config_error("key 'process.file': required when process.kind = matrix");
  }
  return config;
}

auto load_config(const std::string& path) -> Experiment_config {
  auto in = std::ifstream{path};
  if (!in) throw Config_error("cannot open config file '" + path + "'");
  auto buffer = std::ostringstream{};
  buffer << in.rdbuf();
  auto config = parse_config(buffer.str());
  // Relative data paths are taken relative to the config file.
  auto base = std::filesystem::path{path}.parent_path();
  for (auto* file : {&config.family_file, &config.matrix_file}) {
    if (!file->empty() && std::filesystem::path{*file}.is_relative()) *file = (base / *file).string();
  }
  return config;
}

auto canonical_text(const Experiment_config& c) -> std::string {
  auto os = std::ostringstream{};
  os << "family.kind=" << (c.family_kind ? to_string(*c.family_kind) : std::string{"file"}) << '\n';
  os << "family.file=" << c.family_file << '\n';
  os << "family.k=" << c.family.k << '\n';
  os << "family.height=" << format_double(c.family.height) << '\n';
  os << "family.pinch=" << format_double(c.family.pinch) << '\n';
  os << "family.heavy=" << c.family.heavy << '\n';
  os << "family.seed=" << c.family_seed << '\n';
  os << "experiment.k=";
  for (auto k : c.effective_k_values()) os << k << ';';
  os << '\n';
  os << "process.kind=" << to_string(c.process) << '\n';
  os << "process.q=" << format_double(c.q) << '\n';
  os << "process.states=" << c.states << '\n';
  os << "process.rate=" << format_double(c.rate) << '\n';
  os << "process.file=" << c.matrix_file << '\n';
  os << "tkf91=" << format_double(c.tkf91.lambda) << ';' << format_double(c.tkf91.mu) << ';'
     << format_double(c.tkf91.nu);
  for (auto p : c.tkf91.pi) os << ';' << format_double(p);
  os << '\n';
  os << "estimator.kind=" << to_string(c.estimator) << '\n';
  os << "estimator.epsilon=" << format_double(c.epsilon) << '\n';
  os << "estimator.s=" << format_double(c.s) << '\n';
  os << "estimator.h_star=" << format_double(c.h_star) << '\n';
  os << "estimator.row_samples=" << c.row_samples << '\n';
  os << "root=" << (c.fixed_root ? std::to_string(*c.fixed_root) : std::string{"prior"}) << '\n';
  os << "trials=" << c.trials << '\n';
  os << "seed=" << c.seed << '\n';
  return os.str();
}

auto config_hash(const Experiment_config& config) -> std::string {
  auto h = std::uint64_t{0xcbf29ce484222325ULL};
  for (auto ch : canonical_text(config)) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

auto validate(const Experiment_config& c) -> std::vector<std::string> {
  auto out = std::vector<std::string>{};
  if (!(c.s > 0.0)) out.push_back("estimator.s: s must be > 0");

  auto family = Nested_family{};
  try {
    if (c.family_kind) {
      family = generate_family(*c.family_kind, c.family, c.family_seed);
    } else {
      family = read_family_file(c.family_file);
    }
  } catch (const std::exception& e) {
    out.push_back(std::string{"family: "} + e.what());
  }
  if (!family.empty()) {
    if (auto bad = find_nesting_violation(family)) {
      out.push_back("family: not nested at k = " + std::to_string(*bad + 1));
    }
    if (!c.family_kind) {
      for (auto k : c.effective_k_values()) {
        if (k > family.size()) {
          out.push_back("experiment.k: " + std::to_string(k) + " exceeds the family size " +
                        std::to_string(family.size()));
        }
      }
    }
    auto height = 0.0;
    for (const auto& tree : family) height = std::max(height, tree.height());
    if (c.h_star < height - depth_tolerance) out.push_back("estimator.h_star: below the family height");
  }

  auto n_states = std::size_t{0};
  switch (c.process) {
    case Process_kind::two_state:
      n_states = 2;
      break;
    case Process_kind::uniform:
      n_states = c.states;
      break;
    case Process_kind::matrix:
      try {
        n_states = read_rate_matrix_file(c.matrix_file).size();
      } catch (const std::exception& e) {
        out.push_back(std::string{"process.file: "} + e.what());
      }
      break;
    case Process_kind::tkf91:
      try {
        c.tkf91.validate();
      } catch (const std::invalid_argument& e) {
        out.push_back(std::string{"tkf91: "} + e.what());
      }
      break;
  }

  if (c.process == Process_kind::tkf91) {
    if (c.estimator != Estimator_kind::frequency) {
      out.push_back("estimator.kind: only the frequency estimator supports tkf91");
    }
    if (c.fixed_root) out.push_back("root: tkf91 roots are drawn from the stationary law");
  } else {
    if (c.estimator == Estimator_kind::majority && n_states != 2) {
      out.push_back("estimator.kind: majority needs a two-state chain");
    }
    if (c.fixed_root && n_states > 0 && (*c.fixed_root < 0 || static_cast<std::size_t>(*c.fixed_root) >= n_states)) {
      out.push_back("root: state " + std::to_string(*c.fixed_root) + " is out of range");
    }
  }
  return out;
}

}  // namespace rootrecon
