#pragma once

#include <cstddef>
#include <functional>

namespace clews {

// Worker count: CLEWS_THREADS if set and nonzero, otherwise the hardware
// concurrency. Always at least 1.
std::size_t thread_budget();

// Runs fn(i) for i in [0, n), split into contiguous chunks across threads.
// Callers must write to disjoint output slots; results are then independent
// of the schedule.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace clews
