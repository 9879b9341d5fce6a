#pragma once

#include <cstddef>
#include <functional>

namespace symbolkit {

/// Worker count: SYMBOLKIT_THREADS if set, else the hardware concurrency.
unsigned worker_count();

/// Calls fn(i) for i in [0, n) on up to worker_count() threads. Callers write
/// results into per-index slots; the first exception is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace symbolkit
