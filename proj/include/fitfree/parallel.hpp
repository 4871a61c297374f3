#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace fitfree {

// Process-wide worker budget. Set from --threads / FITFREE_THREADS; results
// must not depend on it, so parallel_for always writes into caller-indexed
// slots and never reduces in schedule order.
inline int &thread_budget() {
  static int budget = [] {
    if (const char *env = std::getenv("FITFREE_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1)
        return v;
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
  }();
  return budget;
}

inline void set_thread_budget(int n) { thread_budget() = n < 1 ? 1 : n; }

template <typename Fn>
void parallel_for(std::size_t count, Fn &&fn) {
  int workers = thread_budget();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i)
      fn(i);
    return;
  }
  if (static_cast<std::size_t>(workers) > count)
    workers = static_cast<int>(count);
  std::atomic<std::size_t> cursor{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  std::mutex err_mutex;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = cursor.fetch_add(1);
        if (i >= count || failed.load(std::memory_order_relaxed))
          return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!failed.exchange(true))
            first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto &t : pool)
    t.join();
  if (failed.load())
    std::rethrow_exception(first_error);
}

} // namespace fitfree
