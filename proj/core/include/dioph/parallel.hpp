#pragma once

#include <cstddef>
#include <functional>

namespace dioph {

/// Worker count from DIOPH_THREADS, else hardware concurrency (at least 1).
int default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers. Each index runs
/// exactly once; callers write results into per-index slots and reduce them
/// in index order afterwards, so results never depend on scheduling.
/// The first exception thrown by a body is rethrown on the calling thread.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace dioph
