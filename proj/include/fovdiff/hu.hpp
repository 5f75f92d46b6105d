// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "fovdiff/grid.hpp"

namespace fovdiff {

inline constexpr double kDefaultHuLow = -1000.0;
inline constexpr double kDefaultHuHigh = 600.0;

// Clip to [low, high], then map affinely onto [-1, 1].
double normalize_hu(double hu, double low = kDefaultHuLow, double high = kDefaultHuHigh);
// Inverse of normalize_hu on [-1, 1]; values outside are clipped first.
double denormalize_hu(double value, double low = kDefaultHuLow, double high = kDefaultHuHigh);

Grid normalize_hu(const Grid& hu, double low = kDefaultHuLow, double high = kDefaultHuHigh);
Grid denormalize_hu(const Grid& value, double low = kDefaultHuLow, double high = kDefaultHuHigh);

}  // namespace fovdiff
