// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/hu.hpp"

#include <algorithm>

#include "fovdiff/error.hpp"

namespace fovdiff {

namespace {

void require_window(double low, double high) {
  if (!(low < high)) throw ValidationError("HU window needs low < high");
}

}  // namespace

double normalize_hu(double hu, double low, double high) {
  require_window(low, high);
  const double clipped = std::clamp(hu, low, high);
  return 2.0 * (clipped - low) / (high - low) - 1.0;
}

double denormalize_hu(double value, double low, double high) {
  require_window(low, high);
  const double clipped = std::clamp(value, -1.0, 1.0);
  return low + 0.5 * (clipped + 1.0) * (high - low);
}

Grid normalize_hu(const Grid& hu, double low, double high) {
  Grid out(hu.shape());
  for (std::size_t i = 0; i < hu.size(); ++i) out[i] = normalize_hu(hu[i], low, high);
  return out;
}

Grid denormalize_hu(const Grid& value, double low, double high) {
  Grid out(value.shape());
  for (std::size_t i = 0; i < value.size(); ++i) out[i] = denormalize_hu(value[i], low, high);
  return out;
}

}  // namespace fovdiff
