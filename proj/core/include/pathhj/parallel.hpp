#pragma once

#include <cstddef>
#include <functional>

namespace pathhj {

/// Worker count from PATHHJ_WORKERS (default 1, capped at hardware threads).
std::size_t worker_count();

/// Runs body(i) for i in [0, count) on up to worker_count() threads. Results
/// must be written to per-index slots; the caller reduces them in index order,
/// which keeps every output independent of scheduling. The first exception
/// (lowest index) is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace pathhj
