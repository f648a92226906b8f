// Copyright (c) 2026 The zbtest Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef ZBTEST_DETAIL_PARALLEL_HPP
#define ZBTEST_DETAIL_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace zbtest::detail {

// Worker count: the ZBTEST_THREADS environment variable when set,
// hardware concurrency otherwise.  Results must not depend on this.
inline unsigned worker_count() {
  if (const char* env = std::getenv("ZBTEST_THREADS")) {
    const long n = std::strtol(env, nullptr, 10);
    if (n >= 1 && n <= 4096) return static_cast<unsigned>(n);
  }
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

// Runs fn(i) for i in [0, count) across worker threads.  fn writes its
// result into storage keyed by i, so the outcome is independent of the
// schedule.  The first exception thrown is rethrown on the caller.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const unsigned workers = worker_count();
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  auto body = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace zbtest::detail

#endif  // ZBTEST_DETAIL_PARALLEL_HPP
