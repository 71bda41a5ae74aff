// Copyright 2026 The mlergm Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace mlergm {

/// Worker count: MLERGM_WORKERS if set, else the OpenMP default.
int worker_count();

/// Calls body(i) for i in [0, n) on the worker pool. Nested calls run
/// serially on the calling worker. The first exception thrown by any
/// iteration is rethrown after all iterations finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace mlergm
