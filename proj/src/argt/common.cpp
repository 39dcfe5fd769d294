#include "argt/common.hpp"

#include <atomic>
#include <cstdlib>
#include <thread>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace argt {

namespace {
int g_worker_cap = 0;  // 0 = unset
}

void set_worker_cap(int cap) { g_worker_cap = cap; }

int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  int cap = g_worker_cap;
  if (const char* env = std::getenv("ARGT_WORKERS")) {
    int e = std::atoi(env);
    if (e > 0) cap = (cap > 0) ? std::min(cap, e) : e;
  }
  return (cap > 0) ? std::min(hw, cap) : hw;
}

void parallel_for(int n, const std::function<void(int)>& body) {
  if (n <= 0) return;
  int workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (int i = 0; i < n; ++i) body(i);
#else
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
    });
  }
  for (auto& th : pool) th.join();
#endif
}

}  // namespace argt
