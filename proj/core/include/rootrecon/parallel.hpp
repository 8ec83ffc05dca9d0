#pragma once

#include <cstddef>
#include <functional>

namespace rootrecon {

// Worker count from ROOTRECON_THREADS, else hardware concurrency (at least 1).
auto default_thread_count() -> std::size_t;

// Runs body(i) for i in [0, n) on `threads` workers pulling indices from a shared
// counter. Callers write results into slot i, so output never depends on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace rootrecon
