#include "rootrecon/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace rootrecon {

auto default_thread_count() -> std::size_t {
  if (const char* env = std::getenv("ROOTRECON_THREADS"); env != nullptr && *env != '\0') {
    try {
      auto n = std::stoul(env);
      if (n > 0) {
        return n;
      }
    } catch (const std::exception&) {
      // fall through to hardware concurrency
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
  if (threads == 1) {
    for (auto i = std::size_t{0}; i < n; ++i) {
      body(i);
    }
    return;
  }

  auto next = std::atomic<std::size_t>{0};
  auto failed = std::atomic<bool>{false};
  auto error = std::exception_ptr{};
  auto error_mutex = std::mutex{};

  auto worker = [&] {
    while (!failed.load(std::memory_order_relaxed)) {
      auto i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) {
        return;
      }
      try {
        body(i);
      } catch (...) {
        auto lock = std::scoped_lock{error_mutex};
        if (!error) {
          error = std::current_exception();
        }
        failed = true;
      }
    }
  };

  {
    auto pool = std::vector<std::jthread>{};
    pool.reserve(threads);
    for (auto t = std::size_t{0}; t < threads; ++t) {
      pool.emplace_back(worker);
    }
  }
  if (error) {
    std::rethrow_exception(error);
  }
}

}  // namespace rootrecon
