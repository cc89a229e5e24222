#pragma once

#include <cstddef>
#include <functional>

namespace medrec {

// Worker count: MEDREC_THREADS when set to a positive integer, otherwise the
// hardware concurrency; always at least 1.
unsigned thread_budget();

// Runs body(k) for k in [0, count) on up to thread_budget() threads. Each index
// is visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling. The first exception thrown by any
// body is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace medrec
