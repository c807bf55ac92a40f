#pragma once
#include <cstddef>
#include <functional>

namespace dlht {

// Process-wide worker count used by Monte Carlo loops and candidate training.
// Results never depend on it: every task draws from its own substream.
void set_worker_count(unsigned workers);
unsigned worker_count();

/*
 * Runs body(i) for i in [0, count) on up to worker_count() threads. Tasks are
 * claimed dynamically; the first exception thrown by any task is rethrown
 * after all threads have joined. Calls made from inside a task run serially.
 */
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dlht
