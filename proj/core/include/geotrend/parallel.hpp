#pragma once

#include <cstddef>
#include <functional>

namespace geotrend {

/// Worker count: `requested` if positive, else GEOTREND_THREADS, else 1.
int resolve_threads(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `threads` workers. Indices are
/// handed out dynamically; results must be written to per-index slots. After
/// all workers join, the exception of the lowest failing index is rethrown.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace geotrend
