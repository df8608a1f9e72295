#pragma once

#include <functional>

namespace abxeval {

// 0 means all hardware threads.
int resolve_workers(int workers);

// Runs body(0..n-1) on up to `workers` threads. Tasks pull indices from a
// shared counter; any exceptions are captured and the one with the lowest
// index is rethrown, so failures are deterministic too.
void parallel_for(long n, int workers, const std::function<void(long)>& body);

}  // namespace abxeval
