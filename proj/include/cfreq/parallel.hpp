#pragma once

#include <cstddef>
#include <functional>

namespace cfreq {

/// requested > 0 wins, then COMPOUND_FREQ_THREADS, then hardware concurrency.
[[nodiscard]] int resolve_threads(int requested);

/// Calls fn(index, worker) for index in [0, count). Work is handed out
/// dynamically; callers write results into per-index slots, so the output
/// does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t, int)>& fn);

}  // namespace cfreq
