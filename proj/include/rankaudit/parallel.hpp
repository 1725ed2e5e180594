#pragma once

#include <cstddef>
#include <functional>

namespace rankaudit {

// Worker cap from RANKAUDIT_THREADS (positive integer), else the hardware
// concurrency, never less than 1.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; callers write only to slots owned by i. The first exception
// thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace rankaudit
