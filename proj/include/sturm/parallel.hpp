#pragma once

#include <cstddef>
#include <functional>

namespace sturm {

/// Worker count: hardware concurrency, capped by the STURM_OSC_THREADS
/// environment variable when it holds a positive integer.
int worker_count();

/// Runs body(i) for i in [0, n) on up to worker_count() threads. Indices are
/// handed out in order; the first exception thrown by any body is rethrown
/// after all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sturm
