#pragma once

#include <cstddef>
#include <functional>

namespace itact {

/// Worker count from ITACT_THREADS (unset or 0 means hardware concurrency).
std::size_t default_threads();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default).
/// The first exception by index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace itact
