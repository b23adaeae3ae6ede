#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace nongauss {

inline int default_parallelism() { return std::max(1u, std::thread::hardware_concurrency()); }

/// results[i] = fn(i) for i in [0, count), evaluated on up to `parallelism`
/// threads. Output order never depends on scheduling. The first exception
/// (by index) is rethrown after all workers stop.
template <class Fn>
auto ordered_map(std::size_t count, Fn&& fn, int parallelism = 1) {
  using Result = decltype(fn(std::size_t{}));
  std::vector<Result> results(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int threads = std::clamp(parallelism, 1, static_cast<int>(std::max<std::size_t>(count, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

}  // namespace nongauss
