// Copyright 2026 The reporec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace reporec {

// Runs fn(begin, end) over contiguous chunks of [0, n). Chunks are disjoint,
// so callers stay deterministic as long as each index writes only its own
// slot. Falls back to a single inline call for small n.
template <class Fn>
void parallel_chunks(std::size_t n, const Fn& fn) {
  if (n == 0) return;
  std::size_t hw = std::thread::hardware_concurrency();
  std::size_t workers = std::clamp<std::size_t>(hw == 0 ? 1 : hw, 1, 16);
  if (n < 256 || workers == 1) {
    fn(std::size_t{0}, n);
    return;
  }
  workers = std::min(workers, n);
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    std::size_t begin = w * chunk;
    std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace reporec
