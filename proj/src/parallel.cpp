// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#include "mlergm/parallel.hpp"

#include <omp.h>

#include <cstdlib>
#include <mutex>
#include <string>

namespace mlergm {

int worker_count() {
  if (const char* env = std::getenv("MLERGM_WORKERS")) {
    try {
      const int n = std::stoi(env);
      if (n > 0) return n;
    } catch (const std::exception&) {
    }
  }
  return omp_get_max_threads();
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::exception_ptr error;
  std::mutex error_mutex;
  auto guarded = [&](std::size_t i) {
    try {
      body(i);
    } catch (...) {
      std::lock_guard lock(error_mutex);
      if (!error) error = std::current_exception();
    }
  };
  if (n <= 1 || omp_in_parallel()) {
    for (std::size_t i = 0; i < n; ++i) guarded(i);
  } else {
    const auto count = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count())
    for (long long i = 0; i < count; ++i) guarded(static_cast<std::size_t>(i));
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace mlergm
