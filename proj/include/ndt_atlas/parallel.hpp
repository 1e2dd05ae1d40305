/*
 * Copyright 2026 The NDT Atlas Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef NDT_ATLAS_PARALLEL_HPP_
#define NDT_ATLAS_PARALLEL_HPP_

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace ndt_atlas {

// Work is cut into a fixed grid of chunks (independent of the worker
// count) and partials are combined in chunk order, so floating-point
// results are identical for any number of workers.
inline constexpr std::size_t kReduceChunks = 256;

/// per_chunk(begin, end) -> Partial; combine(acc, partial) folds in chunk
/// order. Returns init when n == 0.
template <typename Partial, typename PerChunk, typename Combine>
Partial chunked_reduce(std::size_t n, int threads, Partial init,
                       PerChunk per_chunk, Combine combine) {
  if (n == 0) {
    return init;
  }
  const std::size_t chunk_count = std::min(kReduceChunks, n);
  const std::size_t chunk_size = (n + chunk_count - 1) / chunk_count;

  std::vector<Partial> partials(chunk_count, init);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = c * chunk_size;
    const std::size_t end = std::min(begin + chunk_size, n);
    if (begin < end) {
      partials[c] = per_chunk(begin, end);
    }
  };

  if (threads <= 1) {
    for (std::size_t c = 0; c < chunk_count; ++c) {
      run_chunk(c);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t c = next.fetch_add(1); c < chunk_count;
           c = next.fetch_add(1)) {
        run_chunk(c);
      }
    };
    std::vector<std::thread> pool;
    const int extra = std::min<int>(threads, static_cast<int>(chunk_count)) - 1;
    pool.reserve(static_cast<std::size_t>(extra));
    for (int t = 0; t < extra; ++t) {
      pool.emplace_back(worker);
    }
    worker();
    for (std::thread& t : pool) {
      t.join();
    }
  }

  Partial acc = init;
  for (std::size_t c = 0; c < chunk_count; ++c) {
    acc = combine(acc, partials[c]);
  }
  return acc;
}

/// Runs fn(i) for i in [0, n) across workers. fn must write only to
/// per-index slots, which keeps the result schedule-independent.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn fn) {
  if (n == 0) {
    return;
  }
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  const int extra = std::min<int>(threads, static_cast<int>(n)) - 1;
  pool.reserve(static_cast<std::size_t>(extra));
  for (int t = 0; t < extra; ++t) {
    pool.emplace_back(worker);
  }
  worker();
  for (std::thread& t : pool) {
    t.join();
  }
}

}  // namespace ndt_atlas

#endif  // NDT_ATLAS_PARALLEL_HPP_
