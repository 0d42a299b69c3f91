#pragma once

// Static block partition of an index range over std::thread workers. Each
// index is processed exactly once, so results written per index do not
// depend on the worker count. Not installed.

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace bayesid::detail {

template <typename Fn>
void parallel_for(long n, int threads, Fn&& fn) {
  threads = std::max(1, std::min<int>(threads, static_cast<int>(std::max(1L, n / 64))));
  if (threads == 1) {
    for (long i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(threads);
  const long chunk = (n + threads - 1) / threads;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long i = w * chunk; i < std::min(n, (w + 1) * chunk); ++i) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace bayesid::detail
