// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/fov.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fovdiff/error.hpp"

namespace fovdiff {

namespace {

void require_mask(const Grid& mask) {
  for (double m : mask.values()) {
    if (m != 0.0 && m != 1.0) throw ValidationError("mask values must be 0 or 1");
  }
}

double ellipse_radius2(double r, double c, double cr, double cc, double ar, double ac) {
  const double dr = (r - cr) / ar;
  const double dc = (c - cc) / ac;
  return dr * dr + dc * dc;
}

}  // namespace

void PhantomConfig::validate() const {
  if (rows < 4 || cols < 4) throw ValidationError("phantom grid must be at least 4x4");
  if (!(axis_row_min > 0.0 && axis_row_min <= axis_row_max && axis_col_min > 0.0 &&
        axis_col_min <= axis_col_max)) {
    throw ValidationError("phantom axis ranges must be positive and ordered");
  }
  if (!(center_jitter >= 0.0)) throw ValidationError("phantom center jitter must be >= 0");
  // Keep at least one background pixel between the body and the border.
  const double row_extent = (axis_row_max + center_jitter) * static_cast<double>(rows) + 1.0;
  const double col_extent = (axis_col_max + center_jitter) * static_cast<double>(cols) + 1.0;
  if (row_extent > 0.5 * static_cast<double>(rows) || col_extent > 0.5 * static_cast<double>(cols)) {
    throw ValidationError("phantom ellipse can exceed the grid");
  }
  if (!(fat_min >= 0.0 && fat_min <= fat_max)) {
    throw ValidationError("phantom fat thickness range must be ordered and >= 0");
  }
  const double min_dim = static_cast<double>(std::min(rows, cols));
  const double min_axis = std::min(axis_row_min * static_cast<double>(rows),
                                   axis_col_min * static_cast<double>(cols));
  if (fat_max * min_dim >= min_axis) {
    throw ValidationError("phantom fat ring can be thicker than the body");
  }
  if (!(fat.low < fat.high && soft_tissue.low < soft_tissue.high)) {
    throw ValidationError("intensity bands must have low < high");
  }
  const bool overlap = fat.high >= soft_tissue.low && soft_tissue.high >= fat.low;
  if (overlap || fat.contains(background) || soft_tissue.contains(background)) {
    throw ValidationError("tissue intensity bands must be disjoint");
  }
  if (!(texture_sigma >= 0.0)) throw ValidationError("texture sigma must be >= 0");
}

Phantom generate_phantom(Rng& rng, const PhantomConfig& config) {
  config.validate();
  const double rows = static_cast<double>(config.rows);
  const double cols = static_cast<double>(config.cols);
  PhantomGeometry geo;
  geo.center_row = 0.5 * rows + rng.uniform(-config.center_jitter, config.center_jitter) * rows;
  geo.center_col = 0.5 * cols + rng.uniform(-config.center_jitter, config.center_jitter) * cols;
  geo.semi_axis_row = rng.uniform(config.axis_row_min, config.axis_row_max) * rows;
  geo.semi_axis_col = rng.uniform(config.axis_col_min, config.axis_col_max) * cols;
  geo.fat_thickness =
      rng.uniform(config.fat_min, config.fat_max) * static_cast<double>(std::min(config.rows, config.cols));

  const double soft_level = rng.uniform(config.soft_tissue.low, config.soft_tissue.high);
  const double fat_level = rng.uniform(config.fat.low, config.fat.high);
  if (!config.fat.contains(fat_level) || !config.soft_tissue.contains(soft_level)) {
    throw NumericError("phantom base intensity escaped its band");
  }

  const double inner_row = geo.semi_axis_row - geo.fat_thickness;
  const double inner_col = geo.semi_axis_col - geo.fat_thickness;
  Phantom p{Grid(config.rows, config.cols, config.background),
            Grid(config.rows, config.cols, kBackground), geo};
  for (std::size_t r = 0; r < config.rows; ++r) {
    for (std::size_t c = 0; c < config.cols; ++c) {
      const double pr = static_cast<double>(r) + 0.5;
      const double pc = static_cast<double>(c) + 0.5;
      if (ellipse_radius2(pr, pc, geo.center_row, geo.center_col, geo.semi_axis_row,
                          geo.semi_axis_col) > 1.0) {
        continue;
      }
      const bool is_fat = geo.fat_thickness > 0.0 &&
                          ellipse_radius2(pr, pc, geo.center_row, geo.center_col, inner_row,
                                          inner_col) > 1.0;
      const IntensityBand& band = is_fat ? config.fat : config.soft_tissue;
      const double level = is_fat ? fat_level : soft_level;
      const double value = level + config.texture_sigma * rng.normal();
      p.labels.at(r, c) = is_fat ? kFat : kSoftTissue;
      p.image.at(r, c) = std::clamp(value, band.low, band.high);
    }
  }
  return p;
}

Grid circular_fov_mask(std::size_t rows, std::size_t cols, double center_row, double center_col,
                       double radius) {
  if (!(radius > 0.0)) throw ValidationError("field-of-view radius must be positive");
  Grid mask(rows, cols, 0.0);
  const double r2 = radius * radius;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double dr = static_cast<double>(r) + 0.5 - center_row;
      const double dc = static_cast<double>(c) + 0.5 - center_col;
      if (dr * dr + dc * dc <= r2) mask.at(r, c) = 1.0;
    }
  }
  return mask;
}

Grid apply_truncation(const Grid& image, const Grid& mask, double fill) {
  require_same_shape(image, mask, "apply_truncation");
  require_mask(mask);
  Grid out(image.shape());
  for (std::size_t i = 0; i < image.size(); ++i) out[i] = mask[i] != 0.0 ? image[i] : fill;
  return out;
}

double tci(const Grid& labels, const Grid& mask) {
  require_same_shape(labels, mask, "tci");
  require_mask(mask);
  std::size_t tissue = 0;
  std::size_t outside = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == static_cast<double>(kBackground)) continue;
    ++tissue;
    if (mask[i] == 0.0) ++outside;
  }
  if (tissue == 0) throw ValidationError("tci: label map has no tissue pixels");
  return static_cast<double>(outside) / static_cast<double>(tissue);
}

void TruncationConfig::validate() const {
  if (!(radius_min > 0.0 && radius_min <= radius_max)) {
    throw ValidationError("truncation radius range must be positive and ordered");
  }
  if (!(center_jitter >= 0.0)) throw ValidationError("truncation center jitter must be >= 0");
  if (!(tci_min >= 0.0 && tci_min <= tci_max && tci_max <= 1.0)) {
    throw ValidationError("truncation TCI range must satisfy 0 <= min <= max <= 1");
  }
  if (max_attempts < 1) throw ValidationError("truncation max_attempts must be >= 1");
}

Truncation sample_truncation(Rng& rng, const Phantom& phantom, const TruncationConfig& config) {
  config.validate();
  const std::size_t rows = phantom.image.rows();
  const std::size_t cols = phantom.image.cols();
  const double min_dim = static_cast<double>(std::min(rows, cols));
  const double jitter = config.center_jitter * static_cast<double>(cols);
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    Truncation tr;
    tr.center_row = 0.5 * static_cast<double>(rows) + rng.uniform(-jitter, jitter);
    tr.center_col = 0.5 * static_cast<double>(cols) + rng.uniform(-jitter, jitter);
    tr.radius = rng.uniform(config.radius_min, config.radius_max) * min_dim;
    tr.mask = circular_fov_mask(rows, cols, tr.center_row, tr.center_col, tr.radius);
    tr.tci = tci(phantom.labels, tr.mask);
    if (tr.tci >= config.tci_min && tr.tci <= config.tci_max) return tr;
  }
  throw ValidationError("no truncation with TCI in [" + std::to_string(config.tci_min) + ", " +
                        std::to_string(config.tci_max) + "] after " +
                        std::to_string(config.max_attempts) + " attempts");
}

}  // namespace fovdiff
