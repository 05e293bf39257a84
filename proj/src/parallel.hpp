#pragma once

#include <exception>
#include <thread>
#include <vector>

namespace nilcount::detail {

inline int resolve_workers(int w) {
  if (w > 0) return w;
  unsigned h = std::thread::hardware_concurrency();
  return h ? static_cast<int>(h) : 1;
}

// Calls body(i) for i in [0, n), strided across workers; results must be
// written to per-index slots so the output order does not depend on scheduling.
template <class Body>
void parallel_for(size_t n, int workers, Body&& body) {
  workers = resolve_workers(workers);
  if (workers == 1 || n < 2) {
    for (size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> err(workers);
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (size_t i = w; i < n; i += workers) body(i);
      } catch (...) {
        err[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : err)
    if (e) std::rethrow_exception(e);
}

}  // namespace nilcount::detail
