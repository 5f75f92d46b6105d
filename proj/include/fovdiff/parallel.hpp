// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace fovdiff {

// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
// exactly once; results must be written to per-index slots by the caller.
// The first exception thrown by any task is rethrown after all threads join.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);

}  // namespace fovdiff
