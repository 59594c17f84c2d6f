#pragma once

#include <functional>

namespace smve::harness {

/// Runs fn(0) .. fn(n-1) on up to `workers` threads. Each index runs exactly
/// once; the first exception thrown by any task is rethrown after all threads join.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

}  // namespace smve::harness
