#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace dbar {

// Applies fn(i) for i in [0, count) and returns the results in input order.
// Work is handed out through an atomic counter, so the assignment of items
// to threads varies between runs while the result vector never does; with
// workers <= 1 everything runs inline on the caller's thread. The first
// exception thrown by fn is rethrown after all threads have joined.
template <typename Result, typename Fn>
std::vector<Result> parallel_map(int count, int workers, Fn fn) {
  std::vector<Result> results(static_cast<std::size_t>(std::max(count, 0)));
  if (count <= 0) return results;
  if (workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }

  std::atomic<int> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto body = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count) return;
      try {
        results[i] = fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  std::vector<std::thread> threads;
  const int spawned = std::min(workers, count);
  threads.reserve(spawned);
  for (int t = 0; t < spawned; ++t) threads.emplace_back(body);
  for (std::thread& t : threads) t.join();
  if (first_error) std::rethrow_exception(first_error);
  return results;
}

}  // namespace dbar
