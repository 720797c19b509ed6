// Worker-thread helper for batch loops. Thread count is capped by the
// MONO2D_THREADS environment variable.
#pragma once

#include <cstddef>
#include <functional>

namespace mono2d {

// Number of workers parallel_for will use (>= 1).
int worker_count();

// Runs fn(i) for i in [0, n). Work items must be independent; results written
// into per-index slots stay deterministic regardless of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace mono2d
