#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "gamow/quadrature.hpp"

namespace gamow {

int worker_count() {
  int n = int(std::max(1u, std::thread::hardware_concurrency()));
  if (const char *env = std::getenv("GAMOW_LAB_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1)
        n = std::min(n, cap);
    } catch (...) {
    }
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)> &task) {
  const std::size_t workers = std::min<std::size_t>(n, std::size_t(worker_count()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          task(i);
        } catch (...) {
          if (!failed.exchange(true))
            failure = std::current_exception();
        }
      }
    });
  for (auto &t : pool)
    t.join();
  if (failure)
    std::rethrow_exception(failure);
}

} // namespace gamow
