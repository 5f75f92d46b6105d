// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fovdiff/fov.hpp"

namespace fovdiff {

struct SampleRecord {
  std::string id;
  std::uint64_t seed = 0;
  PhantomGeometry geometry;
  double fov_center_row = 0.0;
  double fov_center_col = 0.0;
  double fov_radius = 0.0;
  double tci = 0.0;
};

/// Index of a simulated split. Per-sample grids live next to manifest.json
/// as <id>.image.difg, <id>.labels.difg, <id>.mask.difg, <id>.truncated.difg.
struct DatasetManifest {
  std::string split;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double fill = -1.0;
  std::uint64_t seed = 0;
  std::vector<SampleRecord> samples;
};

struct SimulatedSample {
  SampleRecord record;
  Phantom phantom;
  Grid mask;
  Grid truncated;
};

std::string sample_id(std::size_t index);

// Sample `index` of a split is fully determined by (seed, index).
SimulatedSample simulate_sample(std::size_t index, std::uint64_t seed,
                                const PhantomConfig& phantom, const TruncationConfig& truncation);

// Generates `count` samples into `dir` and writes manifest.json.
DatasetManifest simulate_dataset(const std::string& dir, const std::string& split,
                                 std::size_t count, std::uint64_t seed,
                                 const PhantomConfig& phantom, const TruncationConfig& truncation,
                                 std::size_t workers = 1);

std::string sample_path(const std::string& dir, const std::string& id, const std::string& kind);

std::string manifest_to_json(const DatasetManifest& manifest);
DatasetManifest manifest_from_json(const std::string& text);
void write_manifest(const std::string& dir, const DatasetManifest& manifest);
DatasetManifest read_manifest(const std::string& dir);

}  // namespace fovdiff
