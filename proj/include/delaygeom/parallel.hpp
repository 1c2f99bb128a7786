#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <span>

namespace delaygeom
{

// Worker threads to use: DELAYGEOM_THREADS when set to a positive integer,
// otherwise the hardware concurrency.
unsigned worker_count();

// Runs body(i) for i in [0, n). Each index is visited exactly once; the first
// exception thrown by any worker is rethrown after all workers stop.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  const std::atomic<bool>* cancel = nullptr);

// Fixed-order pairwise summation, independent of how the values were produced.
double pairwise_sum(std::span<const double> values);

} // namespace delaygeom
