#pragma once

#include <cstddef>
#include <functional>

namespace fixgraph {

/// Runs fn(0..n-1) on up to `jobs` threads (jobs <= 1 runs inline). Each
/// index is handled exactly once; the exception of the lowest failing index
/// is rethrown after all workers finish.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn);

}  // namespace fixgraph
