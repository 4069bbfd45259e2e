#pragma once

#include <cstddef>
#include <functional>

namespace bookml {

// Worker count used by parallel_for. 0 means hardware concurrency.
void set_num_threads(std::size_t n);
std::size_t num_threads();

// Runs body(i) for every i in [0, n). Work is split into contiguous static
// chunks; callers write results into slots indexed by i, so output never
// depends on the thread count. The exception from the lowest failing index is
// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bookml
