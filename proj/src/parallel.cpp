#include "kdecorrect/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace kdecorrect {

namespace {

std::atomic<int> g_override{0};

int env_threads() {
  const char* raw = std::getenv("KDECORRECT_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  char* end = nullptr;
  long v = std::strtol(raw, &end, 10);
  if (end == raw || v < 0) return 0;
  return static_cast<int>(v);
}

}  // namespace

int worker_count() {
  int n = g_override.load(std::memory_order_relaxed);
  if (n <= 0) n = env_threads();
  if (n <= 0) n = static_cast<int>(std::thread::hardware_concurrency());
  return n > 0 ? n : 1;
}

void set_worker_count(int n) { g_override.store(n < 0 ? 0 : n, std::memory_order_relaxed); }

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  std::size_t workers = static_cast<std::size_t>(worker_count());
  if (workers > n) workers = n;
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  // Contiguous chunks; chunk boundaries depend only on n and workers.
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 1; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    if (begin >= n) break;
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&fn, begin, end] {
      for (std::size_t i = begin; i < end; ++i) fn(i);
    });
  }
  const std::size_t end0 = std::min(n, chunk);
  for (std::size_t i = 0; i < end0; ++i) fn(i);
  for (auto& t : pool) t.join();
}

}  // namespace kdecorrect
