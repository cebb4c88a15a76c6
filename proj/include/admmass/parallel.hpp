#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace admmass {

/// Sets the worker count used by every parallel loop in the library.
/// Values below 1 are clamped to 1.
void set_workers(int workers);
int workers();

/// Runs body(i) for i in [0, count). Iterations are split into contiguous
/// blocks, one per worker; each iteration must write only its own output slot.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Pairwise (cascade) summation with a fixed tree shape, so the result only
/// depends on the order of the input and never on the worker count.
double pairwise_sum(std::span<const double> values);

}  // namespace admmass
