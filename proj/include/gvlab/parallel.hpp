#pragma once

#include <cstddef>
#include <functional>

namespace gvlab {

/// Global worker cap for parallel loops (CLI --threads). 1 = fully serial.
void set_max_threads(int n);
int max_threads();

/// Deterministic parallel loop: the range is split into contiguous chunks,
/// each index computed independently. Results are identical for any thread
/// count as long as fn(i) writes only to slot i of its output.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace gvlab
