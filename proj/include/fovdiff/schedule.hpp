// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fovdiff/grid.hpp"

namespace fovdiff {

/// Noise schedule over T diffusion levels.
///
/// betas are indexed 1..T, cumulative alphas 0..T with alpha_bar(0) == 1
/// exactly, so a sampler step that lands on level 0 returns the clean-image
/// estimate unchanged. Immutable after construction.
class DiffusionSchedule {
 public:
  // betas[0] is beta_1. Throws ValidationError unless every beta is in (0, 1).
  explicit DiffusionSchedule(std::vector<double> betas);

  int steps() const { return static_cast<int>(betas_.size()); }
  double beta(int t) const;
  double alpha_bar(int t) const;

  std::span<const double> betas() const { return betas_; }
  std::span<const double> alpha_bars() const { return alpha_bars_; }

 private:
  std::vector<double> betas_;
  std::vector<double> alpha_bars_;
};

inline constexpr double kDefaultBetaStart = 1e-4;
inline constexpr double kDefaultBetaEnd = 0.02;

// Betas linear from beta_start at t=1 to beta_end at t=T.
DiffusionSchedule linear_beta_schedule(int steps, double beta_start = kDefaultBetaStart,
                                       double beta_end = kDefaultBetaEnd);

/// Strictly decreasing list of levels visited by a sampler. The level that
/// follows the last entry is always 0.
class Trajectory {
 public:
  // Validates ordering and range against `max_step`.
  Trajectory(std::vector<int> steps, int max_step);

  const std::vector<int>& steps() const { return steps_; }
  std::size_t size() const { return steps_.size(); }
  int operator[](std::size_t i) const { return steps_[i]; }
  // Level reached after step i (0 after the last step).
  int prev(std::size_t i) const { return i + 1 < steps_.size() ? steps_[i + 1] : 0; }
  // True for T, T-1, ..., 1.
  bool is_consecutive() const;
  int max_step() const { return max_step_; }

 private:
  std::vector<int> steps_;
  int max_step_;
};

// {T, T-s, ..., T-(n-1)s} with s = floor(T / n). When n divides T the last
// level is s; otherwise the remainder stays at the low end.
Trajectory make_trajectory(int steps, int n_steps);

// sqrt(alpha_bar_t) * x0 + sqrt(1 - alpha_bar_t) * eps
Grid forward_diffuse(const Grid& x0, int t, const Grid& eps, const DiffusionSchedule& schedule);

}  // namespace fovdiff
