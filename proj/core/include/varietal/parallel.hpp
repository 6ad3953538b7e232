#pragma once

#include <cstddef>
#include <functional>

namespace varietal {

/// Worker count for `requested` threads; values below 1 mean "all hardware threads".
int resolve_thread_count(int requested);

/// Calls body(i) for i in [0, count) on up to `threads` threads. Each index is
/// visited exactly once, so writing results by index gives output identical to
/// a sequential loop. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace varietal
