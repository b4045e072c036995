#pragma once

#include <cstddef>
#include <functional>

namespace hankelbands {

// Worker count: HANKELBANDS_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

// Runs body(i) for i in [0, count). Each index is handled exactly once, so results
// written to slot i are independent of scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace hankelbands
