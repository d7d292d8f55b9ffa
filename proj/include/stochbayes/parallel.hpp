#pragma once

#include <cstddef>
#include <functional>

namespace stochbayes {

/// Worker count used by parallel_for: hardware concurrency capped by the
/// STOCHBAYES_THREADS environment variable (values < 1 mean 1).
std::size_t thread_cap();

/// Runs fn(i) for i in [0, n) across up to thread_cap() threads with static
/// contiguous partitioning. Each index is visited exactly once and tasks must
/// write only to their own slots, so results are identical for any worker
/// count. Exceptions from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace stochbayes
