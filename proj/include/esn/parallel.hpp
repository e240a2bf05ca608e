#pragma once

#include <cstddef>
#include <functional>

namespace esn {

// Runs fn(0..count-1) on up to `threads` worker threads (inline when
// threads <= 1). Work items must write only to their own slots; the first
// exception thrown by any item is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace esn
