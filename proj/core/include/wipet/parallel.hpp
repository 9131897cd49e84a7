#pragma once

#include <cstddef>
#include <functional>

namespace wipet {

/// Caps the number of worker threads used by the library. 0 selects the
/// hardware concurrency. Results never depend on this value.
void set_num_threads(unsigned n);
unsigned num_threads();

/// Calls body(begin, end) over [0, n) split into `chunks` fixed ranges.
/// Chunk boundaries depend only on n and chunks, never on the thread count,
/// so any per-chunk accumulation is reproducible.
void parallel_chunks(std::size_t n, std::size_t chunks,
                     const std::function<void(std::size_t chunk, std::size_t begin, std::size_t end)>& body);

/// Element-wise parallel loop; body(i) must only write state owned by i.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace wipet
