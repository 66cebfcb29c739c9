#pragma once

#include <functional>

namespace apgarch {

/// Global cap on worker threads (the CLI's --threads). 0 means hardware concurrency.
void set_max_threads(unsigned threads);
unsigned max_threads();

/// Runs body(i) for i in [0, count). Indices are handed out dynamically, so
/// body must only write to per-index state. The first exception thrown by a
/// worker is rethrown after all workers finish.
void parallel_for(long count, const std::function<void(long)>& body);

}  // namespace apgarch
