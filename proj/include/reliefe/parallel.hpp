#pragma once

#include <cstddef>
#include <functional>

namespace reliefe {

/// Worker count: RELIEFE_THREADS when set and positive, otherwise the
/// hardware concurrency (at least 1).
std::size_t default_thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end, worker) for each. Runs inline when threads <= 1.
void parallel_for(std::size_t n, std::size_t threads,
                  const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

}  // namespace reliefe
