#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace cgfact {

// Number of worker threads used by parallel_for. 0 means hardware concurrency.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

// Runs body(0), ..., body(n - 1) on the worker pool. Each index must write
// only to its own output slot, so results do not depend on scheduling. If any
// call throws, the exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace cgfact
