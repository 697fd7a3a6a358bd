#pragma once

#include <functional>

namespace stolqr {

/// Worker count: $STOLQR_THREADS if set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
int thread_count();

/// Runs fn(i) for i in [0, count) on up to thread_count() threads. Each index
/// runs exactly once; the exception from the lowest failing index is rethrown after all
/// workers finish. Callers write results into per-index slots so the outcome
/// does not depend on scheduling.
void parallel_for(int count, const std::function<void(int)>& fn);

}  // namespace stolqr
