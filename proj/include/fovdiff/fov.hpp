// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

#include "fovdiff/grid.hpp"
#include "fovdiff/rng.hpp"

namespace fovdiff {

enum TissueLabel : int { kBackground = 0, kSoftTissue = 1, kFat = 2 };

struct IntensityBand {
  double low = 0.0;
  double high = 0.0;

  bool contains(double v) const { return v >= low && v <= high; }
};

struct PhantomGeometry {
  double center_row = 0.0;
  double center_col = 0.0;
  double semi_axis_row = 0.0;
  double semi_axis_col = 0.0;
  double fat_thickness = 0.0;  // pixels, measured inward from the body boundary
};

/// Elliptical body with a subcutaneous fat ring on a constant background.
/// Lengths other than the grid size are fractions: axes of rows/cols, the fat
/// thickness of min(rows, cols), the jitter of each dimension.
struct PhantomConfig {
  std::size_t rows = 64;
  std::size_t cols = 64;
  double axis_row_min = 0.28;
  double axis_row_max = 0.36;
  double axis_col_min = 0.34;
  double axis_col_max = 0.42;
  double center_jitter = 0.03;
  double fat_min = 0.025;
  double fat_max = 0.05;
  double background = -1.0;
  IntensityBand fat{-0.3, -0.1};
  IntensityBand soft_tissue{0.0, 0.2};
  double texture_sigma = 0.02;

  // Throws ValidationError if the ellipse can leave the grid or bands overlap.
  void validate() const;
};

struct Phantom {
  Grid image;   // normalized intensities, background -1
  Grid labels;  // TissueLabel values
  PhantomGeometry geometry;
};

Phantom generate_phantom(Rng& rng, const PhantomConfig& config);

// 1 where the pixel centre (r + 0.5, c + 0.5) lies within `radius` of the centre.
Grid circular_fov_mask(std::size_t rows, std::size_t cols, double center_row, double center_col,
                       double radius);

// mask * image + (1 - mask) * fill
Grid apply_truncation(const Grid& image, const Grid& mask, double fill);

// Fraction of tissue (body or fat) pixels lying outside the field of view.
double tci(const Grid& labels, const Grid& mask);

struct TruncationConfig {
  double radius_min = 0.30;  // fraction of min(rows, cols)
  double radius_max = 0.50;
  double center_jitter = 0.15;  // fraction of width, applied per axis
  double tci_min = 0.0;
  double tci_max = 1.0;
  int max_attempts = 1000;
  double fill = -1.0;

  void validate() const;
};

struct Truncation {
  Grid mask;
  double center_row = 0.0;
  double center_col = 0.0;
  double radius = 0.0;
  double tci = 0.0;
};

// Random circular field of view whose TCI falls inside the configured range.
Truncation sample_truncation(Rng& rng, const Phantom& phantom, const TruncationConfig& config);

}  // namespace fovdiff
