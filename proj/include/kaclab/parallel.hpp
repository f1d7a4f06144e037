#pragma once

#include <cstddef>
#include <functional>

namespace kaclab {

/// Worker count: KACLAB_THREADS if set, else hardware concurrency.
unsigned worker_count();

/// Calls body(i) for i in [0, count), split into contiguous chunks across
/// workers. body must only touch state owned by index i. The first exception
/// thrown by any worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace kaclab
