#pragma once

#include <functional>

namespace sqec {

// Global worker count for shot-level and batch-level parallelism.
// Defaults to the hardware concurrency; 1 gives fully serial execution.
void set_num_threads(int n);
int num_threads();

// Static partition of [begin, end); fn(i) must be independent across i.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace sqec
