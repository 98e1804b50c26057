#pragma once

#include <cstddef>
#include <functional>

namespace retnet {

// Worker count: RETNET_THREADS if set to a positive integer, else hardware concurrency.
std::size_t thread_budget();

// Runs fn(i) for i in [0, n). Each index is handled exactly once; callers write
// results into pre-sized slots so output never depends on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace retnet
