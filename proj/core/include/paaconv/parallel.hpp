#pragma once

#include <functional>

namespace paaconv {

// Worker count used by parallel_for: PAACONV_THREADS when set (clamped to
// at least 1), otherwise std::thread::hardware_concurrency().
int worker_count();

// Runs fn(i) for i in [0, n). Work is split into contiguous chunks, one per
// worker, so every index is touched exactly once and writes to per-index
// slots need no synchronization. Falls back to a plain loop for one worker
// or tiny n. Exceptions from fn are rethrown on the calling thread.
void parallel_for(int n, const std::function<void(int)>& fn);

}  // namespace paaconv
