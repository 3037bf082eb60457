#pragma once

#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include <Eigen/Core>

namespace dpmnet {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Static range partition; every index writes its own output slot, so results
// do not depend on the thread count.
template <class Fn>
void parallel_for(Eigen::Index count, int threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || count < 2) {
    for (Eigen::Index i = 0; i < count; ++i) fn(i);
    return;
  }
  if (threads > count) threads = static_cast<int>(count);

  std::mutex mu;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    const Eigen::Index lo = count * t / threads;
    const Eigen::Index hi = count * (t + 1) / threads;
    pool.emplace_back([&, lo, hi] {
      try {
        for (Eigen::Index i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace dpmnet
