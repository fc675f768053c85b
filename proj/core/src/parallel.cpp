#include "pathhj/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace pathhj {

std::size_t worker_count() {
  std::size_t workers = 1;
  if (const char* env = std::getenv("PATHHJ_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) workers = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  return std::min(workers, hw);
}

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace pathhj
