#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace paving_lab {

/// 0 means "use the hardware concurrency".
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested != 0) return requested;
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Splits [0, count) into contiguous chunks and calls fn(chunk, begin, end)
/// for each, one thread per chunk. The first exception thrown is rethrown.
template <class Fn>
void parallel_chunks(std::size_t count, std::size_t threads, Fn&& fn) {
  threads = std::clamp<std::size_t>(resolve_threads(threads), 1, std::max<std::size_t>(1, count));
  if (threads == 1) {
    fn(std::size_t{0}, std::size_t{0}, count);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    const std::size_t begin = count * t / threads, end = count * (t + 1) / threads;
    pool.emplace_back([&, t, begin, end] {
      try {
        fn(t, begin, end);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace paving_lab
