#pragma once

#include <cstddef>
#include <functional>

namespace bvdeg {

/// Number of worker threads used by parallel_for. Initialised from the
/// BVDEG_THREADS environment variable (falls back to hardware concurrency).
std::size_t worker_count();
void set_worker_count(std::size_t n);

/// Re-read BVDEG_THREADS; returns the resulting worker count.
std::size_t configure_workers_from_env();

/// Runs body(i) for i in [0, n). Indices are split into contiguous chunks,
/// one per worker. Callers write results into per-index slots and reduce in
/// index order afterwards, so results never depend on the worker count.
/// Nested calls run serially on the calling thread. If any body throws, the
/// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace bvdeg
