#include "ssr/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ssr {

namespace {
std::atomic<int> g_threads{0};
// Nested parallel_for calls from a worker run serially.
thread_local bool t_in_worker = false;

int env_threads() {
  const char* s = std::getenv("SPHERE_SUPERRES_THREADS");
  if (!s) return 0;
  int v = std::atoi(s);
  return v > 0 ? v : 0;
}
}  // namespace

int thread_count() {
  int t = g_threads.load();
  if (t > 0) return t;
  t = env_threads();
  if (t > 0) return t;
  return std::max(1u, std::thread::hardware_concurrency());
}

void set_thread_count(int n) { g_threads.store(std::max(0, n)); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), n);
  if (workers <= 1 || t_in_worker) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex err_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      t_in_worker = true;
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mu);
          if (!err) err = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

}  // namespace ssr
