#pragma once

#include <cstdint>
#include <random>

namespace rootrecon {

// SplitMix64 finalizer; used to fan a master seed out into independent substreams.
auto mix_seed(std::uint64_t x) -> std::uint64_t;

// Counter-based derivation: the result depends only on (master, stream, index),
// never on the order in which substreams are requested.
auto derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index = 0) -> std::uint64_t;

// Well-known stream ids, so that different consumers of one trial never share draws.
namespace streams {
inline constexpr std::uint64_t root = 1;
inline constexpr std::uint64_t tree_chain = 2;
inline constexpr std::uint64_t estimator = 3;
inline constexpr std::uint64_t plug_in_rows = 4;
inline constexpr std::uint64_t fixtures = 5;
}  // namespace streams

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : seed_{seed}, engine_{mix_seed(seed)} {}

  static auto for_trial(std::uint64_t master, std::uint64_t stream, std::uint64_t trial) -> Rng {
    return Rng{derive_seed(master, stream, trial)};
  }

  // Substream that does not perturb this stream's draws.
  auto split(std::uint64_t stream) const -> Rng { return Rng{derive_seed(seed_, stream)}; }

  auto seed() const -> std::uint64_t { return seed_; }

  // Uniform on [0,1) with 53 random bits.
  auto uniform() -> double { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1].
  auto uniform_positive() -> double { return 1.0 - uniform(); }

  auto exponential(double rate) -> double;

  // Uniform integer in [0, n); unbiased.
  auto index(std::uint64_t n) -> std::uint64_t;

  auto bernoulli(double p) -> bool { return uniform() < p; }

  // Number of failures before the first success.
  auto geometric(double success) -> std::uint64_t;

  // UniformRandomBitGenerator interface
  static constexpr auto min() -> result_type { return std::mt19937_64::min(); }
  static constexpr auto max() -> result_type { return std::mt19937_64::max(); }
  auto operator()() -> result_type { return engine_(); }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace rootrecon
