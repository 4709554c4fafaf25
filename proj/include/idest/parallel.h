#pragma once

#include <cstddef>
#include <functional>

namespace idest {

/// Worker count used when a caller passes 0: IDEST_THREADS if set and valid,
/// otherwise std::thread::hardware_concurrency().
unsigned defaultThreadCount();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Each index is visited exactly once; callers write results into per-index
/// slots so the outcome does not depend on scheduling. The first exception
/// thrown by any body is rethrown after all workers join.
void parallelFor(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace idest
