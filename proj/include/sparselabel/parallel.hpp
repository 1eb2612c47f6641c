#pragma once

#include <cstdint>
#include <functional>

namespace sparselabel {

// Worker count actually used when the caller passes `threads <= 0`.
int default_thread_count();

// Runs task(0..n_tasks-1) across a pool. Tasks must write to disjoint slots;
// under that contract the result is identical for every thread count, since
// task identity (not scheduling) determines each task's random stream.
// Exceptions thrown by tasks are rethrown on the calling thread.
void parallel_for(std::int64_t n_tasks, int threads, const std::function<void(std::int64_t)>& task);

}  // namespace sparselabel
