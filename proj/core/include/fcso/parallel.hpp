#pragma once

#include <functional>

namespace fcso {

/// Worker count from FCSO_WORKERS, else hardware concurrency.
int worker_count();

/// Run fn(i) for i in [begin, end) on a worker pool. Iterations must write
/// disjoint state; results are then identical to sequential execution.
void parallel_for(int begin, int end, const std::function<void(int)>& fn);

}  // namespace fcso
