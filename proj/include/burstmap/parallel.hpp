#pragma once

#include <cstddef>
#include <functional>

namespace burstmap {

// Worker count used when a call passes threads <= 0. Starts from the
// BURSTMAP_THREADS environment variable, else hardware concurrency.
int default_thread_count();
void set_default_thread_count(int threads);

// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers
// write results into per-index slots so the outcome does not depend on
// scheduling. The first exception thrown by any task is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace burstmap
