// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fovdiff/fov.hpp"
#include "fovdiff/grid.hpp"

namespace fovdiff {

/// Subcutaneous-fat surrogate. A pixel is body when its intensity exceeds
/// body_threshold; the outer ring is every body pixel touching a non-body
/// pixel or the image border (4-neighbourhood).
struct SatOptions {
  IntensityBand band{-0.3, -0.1};
  double body_threshold = -0.65;

  void validate() const;
};

// Area (pixel count) of in-band pixels 4-connected through in-band body
// pixels to the outer ring.
double sat_area(const Grid& image, const SatOptions& options = {});

struct RegionError {
  double rmse = 0.0;
  double mae = 0.0;
};

RegionError region_error(const Grid& a, const Grid& b, const Grid& region);

struct Moments {
  Grid mean;
  Grid variance;                                // unbiased, per coordinate
  std::optional<std::array<double, 4>> covariance;  // row-major, 2-value grids only
};

Moments sample_moments(std::span<const Grid> samples);

struct AgreementRecord {
  std::string id;
  double tci = 0.0;
  double sat_true = 0.0;
  double sat_truncated = 0.0;
  double sat_completed = 0.0;
};

// Errors are measured against sat_true; signed error is measured - true.
struct AgreementAggregate {
  double tci_low = 0.0;
  double tci_high = 0.0;
  std::size_t count = 0;
  double truncated_mae = 0.0;
  double truncated_mean_error = 0.0;
  double completed_mae = 0.0;
  double completed_mean_error = 0.0;

  bool operator==(const AgreementAggregate&) const = default;
};

struct AgreementReport {
  std::vector<double> bin_edges;  // lower edges; last bin extends to 1
  std::vector<AgreementRecord> records;  // sorted by id
  std::vector<AgreementAggregate> bins;
  AgreementAggregate overall;
};

inline const std::vector<double> kDefaultTciBinEdges{0.0, 0.1, 0.2, 0.3};

// Sorts records by id and fills every aggregate.
AgreementReport build_report(std::vector<AgreementRecord> records, std::vector<double> bin_edges);

struct EvaluationResult {
  AgreementReport report;
  std::vector<std::string> missing;  // manifest ids without a completed image
};

// Completed images are read from <completed_dir>/<id>.completed.difg.
EvaluationResult evaluate_dataset(const std::string& dataset_dir, const std::string& completed_dir,
                                  const SatOptions& options = {},
                                  std::vector<double> bin_edges = kDefaultTciBinEdges);

std::string report_to_json(const AgreementReport& report);
AgreementReport report_from_json(const std::string& text);
std::string records_to_csv(const std::vector<AgreementRecord>& records);
std::vector<AgreementRecord> records_from_csv(const std::string& text);

bool operator==(const AgreementRecord& a, const AgreementRecord& b);  // bitwise on doubles
bool operator==(const AgreementReport& a, const AgreementReport& b);

}  // namespace fovdiff
