#pragma once

#include <cstddef>
#include <functional>

namespace berezin {

// worker cap; 0 means "use BEREZIN_LAB_THREADS or 1"
void set_thread_count(int n);
int thread_count();

// runs body(i) for i in [0, n); tasks must write disjoint outputs.
// Results never depend on the worker count because reductions happen
// afterwards in index order.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace berezin
