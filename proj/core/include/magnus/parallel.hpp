#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace magnus {

namespace detail {
inline std::atomic<int>& thread_cap() {
  static std::atomic<int> cap{0};
  return cap;
}
}  // namespace detail

// Worker cap for parallel_for. 0 means "decide from MAGNUS_THREADS or the
// hardware". Results never depend on the thread count; it only changes timing.
inline void set_max_threads(int n) { detail::thread_cap().store(n > 0 ? n : 0); }

inline int max_threads() {
  if (int cap = detail::thread_cap().load(); cap > 0) return cap;
  if (const char* env = std::getenv("MAGNUS_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(i) for i in [0, n), splitting indices into contiguous chunks.
// Each index runs exactly once; the first exception rethrows in the caller.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  if (n <= 0) return;
  const int workers = std::min(n, max_threads());
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int begin = w * chunk, end = std::min(n, begin + chunk);
    pool.emplace_back([&, w, begin, end] {
      try {
        for (int i = begin; i < end; ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace magnus
