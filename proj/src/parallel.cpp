#include "tneedlet/parallel.hpp"

#include <atomic>
#include <stdexcept>

namespace tneedlet {

namespace {
std::atomic<int> g_threads{static_cast<int>(std::max(1u, std::thread::hardware_concurrency()))};
}

void set_thread_count(int threads) {
  if (threads < 1) throw std::invalid_argument("thread count must be >= 1");
  g_threads = threads;
}

int thread_count() { return g_threads; }

bool& detail::inside_parallel_region() {
  thread_local bool inside = false;
  return inside;
}

}  // namespace tneedlet
