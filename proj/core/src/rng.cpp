#include "rootrecon/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rootrecon {

auto mix_seed(std::uint64_t x) -> std::uint64_t {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

auto derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) -> std::uint64_t {
  auto h = mix_seed(master);
  h = mix_seed(h ^ (stream * 0xd1342543de82ef95ULL));
  h = mix_seed(h ^ (index * 0x2545f4914f6cdd1dULL + 0x632be59bd9b4e019ULL));
  return h;
}

auto Rng::exponential(double rate) -> double {
  if (!(rate > 0.0)) {
    throw std::invalid_argument("exponential rate must be positive");
  }
  return -std::log(uniform_positive()) / rate;
}

auto Rng::index(std::uint64_t n) -> std::uint64_t {
  if (n == 0) {
    throw std::invalid_argument("index range must be nonempty");
  }
  // Reject the incomplete top block.
  auto limit = max() - (max() % n + 1) % n;
  auto x = engine_();
  while (x > limit) {
    x = engine_();
  }
  return x % n;
}

auto Rng::geometric(double success) -> std::uint64_t {
  if (!(success > 0.0 && success <= 1.0)) {
    throw std::invalid_argument("geometric success probability must be in (0,1]");
  }
  if (success == 1.0) {
    return 0;
  }
  // Inversion: floor(log U / log(1-p)).
  auto u = uniform_positive();
  return static_cast<std::uint64_t>(std::floor(std::log(u) / std::log1p(-success)));
}

}  // namespace rootrecon
