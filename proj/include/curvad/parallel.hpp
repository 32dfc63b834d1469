#pragma once

#include <cstddef>
#include <functional>

namespace curvad {

/// Worker cap: CURVAD_THREADS if set and positive, else hardware concurrency.
std::size_t default_worker_count();

/// Runs body(begin, end) over contiguous chunks of [0, n). Chunks never share
/// output slots, so results do not depend on the worker count.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& body);

inline void parallel_for(std::size_t n,
                         const std::function<void(std::size_t, std::size_t)>& body) {
    parallel_for(n, default_worker_count(), body);
}

}  // namespace curvad
