#ifndef FIELDCALC_PARALLEL_HPP
#define FIELDCALC_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace fieldcalc {

/// Runs f(i) for i in [0, n). Each index is computed exactly once and
/// independently, so results are bit-identical for any thread count as long
/// as f(i) writes only to slot i.
template <class F>
void parallel_for(std::size_t n, unsigned threads, F&& f) {
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  unsigned count = std::min<std::size_t>(threads, n);
  pool.reserve(count);
  for (unsigned t = 0; t < count; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// Default worker count: FIELDCALC_THREADS when set and >= 1, else 1.
inline unsigned default_thread_count() {
  if (const char* env = std::getenv("FIELDCALC_THREADS")) {
    int v = std::atoi(env);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

}  // namespace fieldcalc

#endif  // FIELDCALC_PARALLEL_HPP
