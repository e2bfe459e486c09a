#pragma once

#include <cstddef>
#include <functional>

namespace corrtest {

/// Worker count: CORRTEST_THREADS if set and positive, else the hardware concurrency.
int worker_count();

/// Runs body(i) for i in [0, n). Every index is visited exactly once; the order
/// across workers is unspecified, so bodies must only write to per-index slots.
/// The first exception thrown by any body is rethrown on the calling thread.
/// Calls made from inside a body run serially on the calling worker.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace corrtest
