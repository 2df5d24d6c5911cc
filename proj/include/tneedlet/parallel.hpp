#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <exception>
#include <thread>
#include <vector>

namespace tneedlet {

/// Caps the number of worker threads used by library loops (>= 1).
void set_thread_count(int threads);
int thread_count();

namespace detail {
bool& inside_parallel_region();
}

/// Runs body(i) for i in [begin, end) on up to thread_count() threads using
/// contiguous static chunks. Nested calls run serially. body must only write
/// to slots owned by its index so results do not depend on the thread count.
template <typename Body>
void parallel_for(Eigen::Index begin, Eigen::Index end, Body&& body) {
  const Eigen::Index count = end - begin;
  if (count <= 0) return;
  const int workers = static_cast<int>(std::min<Eigen::Index>(thread_count(), count));
  if (workers <= 1 || detail::inside_parallel_region()) {
    for (Eigen::Index i = begin; i < end; ++i) body(i);
    return;
  }

  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  std::vector<std::thread> pool;
  pool.reserve(std::size_t(workers));
  for (int w = 0; w < workers; ++w) {
    const Eigen::Index lo = begin + count * w / workers;
    const Eigen::Index hi = begin + count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi, w] {
      detail::inside_parallel_region() = true;
      try {
        for (Eigen::Index i = lo; i < hi; ++i) body(i);
      } catch (...) {
        errors[std::size_t(w)] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tneedlet
