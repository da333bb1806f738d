#pragma once

#include <cstddef>
#include <functional>

namespace optdesign {

// Number of worker threads: hardware concurrency capped by the
// OPTDESIGN_THREADS environment variable (values < 1 mean 1).
int thread_count();

// Runs fn(begin, end) over a partition of [0, n) into contiguous chunks,
// one chunk per thread. Chunks are disjoint, so writers that only touch
// their own index range produce results identical to a sequential run;
// reductions over the filled arrays must be done sequentially afterwards.
// Small n runs inline on the calling thread.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace optdesign
