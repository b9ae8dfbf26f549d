#pragma once

// Index-parallel loops. Work items write to their own slots, so results do
// not depend on the number of threads.

#include <cstddef>
#include <cstdint>
#include <functional>

namespace hkt {

// Defaults to HKTGEOM_THREADS when set, else the hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Calls f(i) for i in [0, n). Rethrows the exception of the lowest failing index.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& f);

// Independent seed for work item i.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t i);

}  // namespace hkt
