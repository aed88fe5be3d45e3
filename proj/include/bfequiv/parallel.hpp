#pragma once

#include <cstddef>
#include <functional>

namespace bfe {

// Runs body(i) for i in [0, count) on up to `workers` threads. Work items are
// handed out in index order; callers write results into slot i so the outcome
// does not depend on the worker count. The first exception thrown by any item
// is rethrown after all threads have joined.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

// Fixed chunk size for Monte Carlo loops; keeping it independent of the worker
// count keeps substream assignment (and therefore results) reproducible.
inline constexpr std::size_t kMcChunk = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kMcChunk - 1) / kMcChunk; }

int default_workers() noexcept;

}  // namespace bfe
