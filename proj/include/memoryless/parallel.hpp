#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace memoryless {

/// 0 means one worker per hardware thread.
int resolve_jobs(int jobs);

/// Calls fn(i) for i in [0, count) across up to `jobs` workers.
/// Callers write results into per-index slots so merge order does not depend on scheduling.
template <typename Fn>
void parallel_for(std::uint64_t count, int jobs, Fn&& fn) {
  int workers = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(resolve_jobs(jobs)), count));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr error;
  std::mutex errorMutex;
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::uint64_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(errorMutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace memoryless
