#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <thread>
#include <vector>

#include "pickands/types.hpp"

namespace pickands {

// Deterministic chunked map-reduce over n samples. fn(chunk_index, count) is
// evaluated for every chunk (threads race over chunks, results land in a
// per-chunk slot), then collect(chunk_index, result) runs sequentially in
// chunk order. Output is therefore a function of (n, chunk size) only, never
// of the worker count or scheduling.
template <class ChunkResult, class Fn, class Collect>
void chunked_reduce(std::uint64_t n, const ExecPolicy& policy, Fn&& fn,
                    Collect&& collect) {
  const std::uint64_t chunk = policy.chunk > 0 ? policy.chunk : 16384;
  const std::uint64_t n_chunks = n == 0 ? 0 : (n + chunk - 1) / chunk;
  std::vector<ChunkResult> results(n_chunks);

  auto run = [&](std::uint64_t c) {
    const std::uint64_t first = c * chunk;
    const std::uint64_t count = first + chunk <= n ? chunk : n - first;
    results[c] = fn(c, count);
  };

  const unsigned workers = policy.workers > 0 ? policy.workers : 1;
  if (workers == 1 || n_chunks <= 1) {
    for (std::uint64_t c = 0; c < n_chunks; ++c) run(c);
  } else {
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (std::uint64_t c = next.fetch_add(1); c < n_chunks;
           c = next.fetch_add(1))
        run(c);
    };
    std::vector<std::thread> pool;
    const unsigned spawn =
        static_cast<unsigned>(std::min<std::uint64_t>(workers, n_chunks));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (std::uint64_t c = 0; c < n_chunks; ++c) collect(c, results[c]);
}

// Neumaier compensated accumulator; deterministic for a fixed addition order.
struct KahanSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

}  // namespace pickands
