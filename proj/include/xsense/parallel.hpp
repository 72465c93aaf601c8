#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace xsense {

struct ChunkRange {
  std::uint64_t index;
  std::uint64_t begin;
  std::uint64_t end;
};

inline std::uint64_t chunk_count(std::uint64_t total, std::uint64_t chunk_size) {
  return (total + chunk_size - 1) / chunk_size;
}

/// Runs `body` over fixed-size chunks of [0, total). Chunk boundaries depend
/// only on (total, chunk_size), never on the worker count, so results merged
/// in chunk order are identical no matter how many threads execute them.
/// Workers pull chunks from an atomic counter; the body must write only to
/// per-chunk slots.
template <class Body>
void for_each_chunk(std::uint64_t total, std::uint64_t chunk_size, int workers, Body&& body) {
  if (total == 0) return;
  if (chunk_size == 0) chunk_size = 1;
  const std::uint64_t chunks = chunk_count(total, chunk_size);

  auto run_chunk = [&](std::uint64_t c) {
    ChunkRange r;
    r.index = c;
    r.begin = c * chunk_size;
    r.end = std::min(total, r.begin + chunk_size);
    body(r);
  };

  if (workers <= 1 || chunks == 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }

  std::atomic<std::uint64_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto worker = [&] {
    for (;;) {
      const std::uint64_t c = next.fetch_add(1);
      if (c >= chunks || failed.load()) return;
      try {
        run_chunk(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  const int nthreads = static_cast<int>(std::min<std::uint64_t>(workers, chunks));
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

/// Streaming mean/variance accumulator with exact deterministic merging.
struct RunningMoments {
  std::uint64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double d = x - mean;
    mean += d / static_cast<double>(count);
    m2 += d * (x - mean);
  }

  /// Chan's pairwise merge.
  void merge(const RunningMoments& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double d = o.mean - mean;
    const std::uint64_t total = count + o.count;
    mean += d * static_cast<double>(o.count) / static_cast<double>(total);
    m2 += o.m2 + d * d * static_cast<double>(count) * static_cast<double>(o.count) /
                     static_cast<double>(total);
    count = total;
  }

  double variance() const { return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0; }
  double stderr_of_mean() const {
    return count > 1 ? std::sqrt(variance() / static_cast<double>(count)) : 0.0;
  }
};

}  // namespace xsense
