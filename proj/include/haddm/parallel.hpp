#pragma once

#include <functional>

namespace haddm {

// Worker count for trial-level parallelism. The HAD_DM_THREADS environment
// variable caps it; 0 or unset means hardware concurrency.
int worker_count();

// Runs body(i) for i in [0, n) across workers. Bodies must write results
// into preallocated per-index slots; reductions are then done serially in
// index order so results do not depend on the worker count.
void parallel_for(int n, const std::function<void(int)>& body);

}  // namespace haddm
