#pragma once

#include <cstddef>
#include <functional>

namespace softgait {

/// Runs fn(0) .. fn(count - 1) on up to `workers` threads. Indices are
/// claimed dynamically, so fn must write only to its own index's output.
/// The exception from the lowest failing index is rethrown after all
/// workers finish.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace softgait
