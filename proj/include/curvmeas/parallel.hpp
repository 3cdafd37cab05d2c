#pragma once

#include <cstddef>
#include <functional>

namespace curvmeas {

// Worker count: hardware concurrency capped by CURVMEAS_THREADS.
std::size_t thread_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks;
// callers write results by index so the output order is deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace curvmeas
