#pragma once

#include <cstddef>
#include <functional>
#include <utility>

namespace nqs {

// Process-wide worker cap, set from CLI --threads. Defaults to the hardware
// concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

// Fixed partition of [0, n) into nblocks near-equal chunks. The partition
// depends only on (n, nblocks), never on the thread count, so per-block
// accumulations reduced in block order give identical floating-point results
// for any number of workers.
std::pair<std::size_t, std::size_t> block_range(std::size_t n,
                                                std::size_t nblocks,
                                                std::size_t b);

// Runs fn(b) for every b in [0, nblocks), using at most max_threads() workers.
void parallel_blocks(std::size_t nblocks,
                     const std::function<void(std::size_t)>& fn);

}  // namespace nqs
