#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace dfc {

// Runs body(begin, end, worker) over contiguous chunks of [0, n).
// Chunk boundaries depend only on n and threads, never on timing.
template <typename Body>
void parallel_for(std::int64_t n, int threads, Body&& body) {
  threads = std::max(1, std::min<int>(threads, int(std::max<std::int64_t>(1, n))));
  if (threads == 1) {
    body(std::int64_t(0), n, 0);
    return;
  }
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    const std::int64_t b = n * w / threads, e = n * (w + 1) / threads;
    pool.emplace_back([&body, b, e, w] { body(b, e, w); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace dfc
