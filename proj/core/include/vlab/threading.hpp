#pragma once

#include <cstddef>
#include <functional>

namespace vlab {

// Global worker count for row-parallel loops. 1 is the reference mode and
// must be bitwise reproducible; any fixed n >= 1 is deterministic as well
// because chunk boundaries depend only on (n_items, n_threads).
void set_num_threads(int n);
int num_threads();

// Runs fn(begin, end) over a fixed partition of [0, n_items).
void parallel_for(std::size_t n_items, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace vlab
