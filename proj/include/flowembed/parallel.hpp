#pragma once

#include <cstddef>
#include <functional>

namespace flowembed::par {

/// Worker count for `jobs` independent tasks: hardware concurrency
/// capped by the FLOWEMBED_THREADS environment variable (and by the job
/// count); always >= 1.
int worker_count(std::size_t jobs);

/// Runs fn(i) for i in [0, n) across workers. Results must be written
/// into caller-owned slots indexed by i, so the outcome is independent
/// of scheduling. If several calls throw, the exception from the lowest
/// index is rethrown.
void for_each_index(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace flowembed::par
