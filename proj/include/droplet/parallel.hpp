#pragma once

// Minimal deterministic work-splitting.  Scans partition their index range
// into contiguous chunks and merge per-chunk results in chunk order, so the
// reported numbers are bit-identical for every thread count.

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace droplet::detail {

// Thread-count resolution: explicit request > DROPLET_THREADS env > hardware.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("DROPLET_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

// Run fn(chunk, begin, end) over a partition of [0, n) into `threads`
// contiguous chunks.  fn must be safe to call concurrently; chunk indices
// are dense so callers can collect per-chunk results and fold them in order.
template <class Fn>
void run_chunks(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t want = std::max<std::size_t>(1, std::min<std::size_t>(threads, n ? n : 1));
  if (want == 1) {
    fn(std::size_t{0}, std::size_t{0}, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(want);
  const std::size_t per = n / want, extra = n % want;
  std::size_t begin = 0;
  for (std::size_t c = 0; c < want; ++c) {
    const std::size_t len = per + (c < extra ? 1 : 0);
    const std::size_t b = begin, e = begin + len;
    pool.emplace_back([&fn, c, b, e] { fn(c, b, e); });
    begin += len;
  }
  for (auto& t : pool) t.join();
}

}  // namespace droplet::detail
