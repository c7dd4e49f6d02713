// Copyright 2026 The dexgrasp Authors
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

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace dexgrasp::detail {

// Runs fn(i) for i in [begin, end) across up to `workers` threads. Each index
// is computed exactly once and must write only to its own slot, so results
// are identical for any worker count.
inline void parallel_for(int begin, int end, int workers,
                         const std::function<void(int)>& fn) {
  if (workers <= 1 || end - begin <= 1) {
    for (int i = begin; i < end; ++i) fn(i);
    return;
  }
  std::atomic<int> next(begin);
  std::vector<std::thread> pool;
  const int n = std::min(workers, end - begin);
  pool.reserve(n);
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= end) break;
        fn(i);
      }
    });
  }
  for (std::thread& th : pool) th.join();
}

}  // namespace dexgrasp::detail
