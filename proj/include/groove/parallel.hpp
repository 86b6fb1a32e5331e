#pragma once

#include <cstddef>
#include <functional>

namespace groove {

// Worker count: GROOVE_PROBE_THREADS when set to a positive integer,
// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t default_thread_count();

// Calls body(i) for i in [0, count) on up to `threads` workers. Each index is
// visited exactly once. The first exception thrown by any body is rethrown
// after all workers join. Callers write results into per-index slots so the
// outcome never depends on scheduling.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace groove
