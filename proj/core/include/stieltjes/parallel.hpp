#pragma once

#include <cstddef>
#include <functional>

namespace stieltjes {

// Worker count: hardware concurrency capped by STIELTJES_SPEC_THREADS.
int thread_budget();

// Runs body(i) for i in [0,n). Each index is handled exactly once; callers
// write results by index, so output order never depends on scheduling.
// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace stieltjes
