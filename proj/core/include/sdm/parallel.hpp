#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>

namespace sdm {

// Runs body(i) for i in [0, count) on up to `workers` threads (0 = hardware
// concurrency). Work is split into contiguous blocks, so any per-index output
// written by body lands in input order regardless of the thread count.
// The first exception thrown by a worker is rethrown on the calling thread.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned workers = 0);

// Stream seed for unit `index` of a computation seeded with `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

}  // namespace sdm
