#pragma once

#include <cstddef>
#include <functional>

namespace ssr {

// Worker count: explicit setting, else SPHERE_SUPERRES_THREADS, else the
// hardware concurrency.
int thread_count();
void set_thread_count(int n);

// Runs body(i) for i in [0, n) on up to thread_count() workers. Each index is
// visited exactly once; callers write results into per-index slots so the
// outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ssr
