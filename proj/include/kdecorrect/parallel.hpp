#pragma once

#include <cstddef>
#include <functional>

namespace kdecorrect {

// Number of worker threads used by parallel_for. Resolution order:
// explicit set_worker_count() override, then the KDECORRECT_THREADS
// environment variable, then hardware concurrency. A value of 0 means
// "auto" at every level.
int worker_count();

// Override the worker count for this process (0 restores auto).
void set_worker_count(int n);

// Runs fn(i) for every i in [0, n). Work items must be independent;
// threads receive contiguous index ranges, so any per-index output is
// identical regardless of the number of workers. Reductions across
// indices belong in a sequential pass after this returns.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace kdecorrect
