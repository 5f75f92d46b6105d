// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "fovdiff/grid.hpp"

namespace fovdiff {

// Grid container, little-endian:
//   "DIFG" | u32 version = 1 | u32 ndim (1 or 2) | u32 dim... | u8 dtype | payload
// dtype 1 = f32, 2 = f64, payload row-major.
enum class GridDtype : std::uint8_t { kF32 = 1, kF64 = 2 };

inline constexpr std::uint32_t kGridFormatVersion = 1;

struct DecodedGrid {
  Grid grid;
  GridDtype dtype;
};

std::string encode_grid(const Grid& grid, GridDtype dtype = GridDtype::kF64);
DecodedGrid decode_grid(std::string_view bytes);

void write_grid(const std::string& path, const Grid& grid, GridDtype dtype = GridDtype::kF64);
Grid read_grid(const std::string& path);

}  // namespace fovdiff
