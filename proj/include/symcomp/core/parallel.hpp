#ifndef SYMCOMP_CORE_PARALLEL_HPP
#define SYMCOMP_CORE_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace symcomp {

/// Worker count used when a caller passes 0: SYMCOMP_THREADS, else hardware.
std::size_t default_threads();

/* 0 means "use default_threads()" */
inline std::size_t resolve_threads(std::size_t requested) {
  return requested == 0 ? default_threads() : requested;
}

/*
 * Split [0, n) into `chunks` contiguous ranges and run fn(chunk, begin, end)
 * for each one on its own thread. Chunk boundaries depend only on n and the
 * chunk count, so callers that merge per-chunk results in chunk order get
 * output independent of scheduling. The first exception is rethrown.
 */
template <class Fn>
void for_each_chunk(std::size_t n, std::size_t chunks, Fn&& fn) {
  chunks = std::max<std::size_t>(1, std::min(chunks, n == 0 ? 1 : n));
  if (chunks == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::exception_ptr> errors(chunks);
  std::vector<std::thread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = n * c / chunks;
    const std::size_t end = n * (c + 1) / chunks;
    workers.emplace_back([&, c, begin, end] {
      try {
        fn(c, begin, end);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace symcomp

#endif
