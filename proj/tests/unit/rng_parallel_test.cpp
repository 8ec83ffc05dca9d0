#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <set>
#include <stdexcept>
#include <vector>

#include "rootrecon/parallel.hpp"
#include "rootrecon/rng.hpp"

namespace rootrecon {
namespace {

TEST(Rng, SameSeedSameStream) {
  auto a = Rng{42};
  auto b = Rng{42};
  for (auto i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, DerivedSeedsAreDistinct) {
  auto seen = std::set<std::uint64_t>{};
  for (auto stream = 0u; stream < 8; ++stream) {
    for (auto index = 0u; index < 1000; ++index) seen.insert(derive_seed(7, stream, index));
  }
  EXPECT_EQ(seen.size(), 8000u);
}

TEST(Rng, UniformStaysInUnitInterval) {
  auto rng = Rng{1};
  for (auto i = 0; i < 10000; ++i) {
    auto u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_GT(rng.uniform_positive(), 0.0);
  }
}

TEST(Rng, IndexIsUnbiased) {
  auto rng = Rng{3};
  auto counts = std::vector<int>(3, 0);
  constexpr auto n = 300000;
  for (auto i = 0; i < n; ++i) ++counts[rng.index(3)];
  for (auto c : counts) EXPECT_NEAR(c / double(n), 1.0 / 3.0, 4.0 * std::sqrt(2.0 / 9.0 / n));
}

TEST(Rng, GeometricMeanMatches) {
  auto rng = Rng{5};
  constexpr auto n = 200000;
  auto sum = 0.0;
  for (auto i = 0; i < n; ++i) sum += static_cast<double>(rng.geometric(0.5));
  // failures before the first success: mean (1-p)/p = 1, variance (1-p)/p^2 = 2
  EXPECT_NEAR(sum / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, ExponentialMeanMatches) {
  auto rng = Rng{6};
  constexpr auto n = 200000;
  auto sum = 0.0;
  for (auto i = 0; i < n; ++i) sum += rng.exponential(2.0);
  EXPECT_NEAR(sum / n, 0.5, 4.0 * 0.5 / std::sqrt(n));
}

TEST(ParallelFor, VisitsEveryIndexOnce) {
  auto hits = std::vector<std::atomic<int>>(1000);
  parallel_for(hits.size(), 4, [&](std::size_t i) { ++hits[i]; });
  for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
}

TEST(ParallelFor, RethrowsWorkerExceptions) {
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 57) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

TEST(ParallelFor, ThreadCountFromEnvironment) {
  ::setenv("ROOTRECON_THREADS", "3", 1);
  EXPECT_EQ(default_thread_count(), 3u);
  ::unsetenv("ROOTRECON_THREADS");
  EXPECT_GE(default_thread_count(), 1u);
}

}  // namespace
}  // namespace rootrecon
