#ifndef TOMOLAB_PARALLEL_HPP
#define TOMOLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace tomolab {

/// Number of workers to use: `requested` if positive, otherwise the hardware
/// concurrency; either way capped by the TOMOLAB_THREADS environment variable.
int worker_count(int requested = 0);

/// Calls task(k) for k in [0, count) on up to `threads` workers. Tasks must
/// write their results by index. The first exception (lowest index) is
/// rethrown after all workers have joined.
template <typename Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(threads < 1 ? 1 : threads));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    for (std::size_t k = next++; k < count; k = next++) {
      try {
        task(k);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  if (workers <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run);
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace tomolab

#endif  // TOMOLAB_PARALLEL_HPP
