// Copyright 2026 The POTMMCP Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef POTMMCP_PARALLEL_H_
#define POTMMCP_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace potmmcp {

// Worker count for `requested` (0 = hardware concurrency), never above `jobs`.
inline int ResolveWorkers(int requested, int jobs) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  return std::max(1, std::min(n, jobs));
}

// Calls fn(k) for k in [0, jobs) on up to `workers` threads. Results must be
// written to per-index slots so the outcome does not depend on scheduling.
// The first exception thrown by any job is rethrown after all workers stop.
template <class Fn>
void ParallelFor(int jobs, int workers, Fn&& fn) {
  workers = ResolveWorkers(workers, jobs);
  if (workers <= 1) {
    for (int k = 0; k < jobs; ++k) fn(k);
    return;
  }
  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto body = [&] {
    for (;;) {
      const int k = next.fetch_add(1);
      if (k >= jobs || failed.load()) return;
      try {
        fn(k);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace potmmcp

#endif  // POTMMCP_PARALLEL_H_
