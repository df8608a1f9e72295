#include "abxeval/parallel.hpp"

#include <atomic>
#include <exception>
#include <thread>
#include <vector>

namespace abxeval {

int resolve_workers(int workers) {
  if (workers > 0) return workers;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void parallel_for(long n, int workers, const std::function<void(long)>& body) {
  if (n <= 0) return;
  int nthreads = resolve_workers(workers);
  if (nthreads > n) nthreads = static_cast<int>(n);

  if (nthreads == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }

  std::atomic<long> next{0};
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nthreads));
  for (int t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      while (true) {
        long i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace abxeval
