// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/schedule.hpp"

#include <cmath>
#include <string>

#include "fovdiff/error.hpp"
#include "fovdiff/simd/kernels.hpp"

namespace fovdiff {

DiffusionSchedule::DiffusionSchedule(std::vector<double> betas) : betas_(std::move(betas)) {
  if (betas_.empty()) throw ValidationError("schedule needs at least one step");
  alpha_bars_.resize(betas_.size() + 1);
  alpha_bars_[0] = 1.0;
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    const double b = betas_[i];
    if (!(b > 0.0 && b < 1.0)) {
      throw ValidationError("beta_" + std::to_string(i + 1) + " outside (0, 1)");
    }
    alpha_bars_[i + 1] = alpha_bars_[i] * (1.0 - b);
  }
}

double DiffusionSchedule::beta(int t) const {
  if (t < 1 || t > steps()) throw ValidationError("beta index out of range: " + std::to_string(t));
  return betas_[static_cast<std::size_t>(t - 1)];
}

double DiffusionSchedule::alpha_bar(int t) const {
  if (t < 0 || t > steps()) {
    throw ValidationError("alpha_bar index out of range: " + std::to_string(t));
  }
  return alpha_bars_[static_cast<std::size_t>(t)];
}

DiffusionSchedule linear_beta_schedule(int steps, double beta_start, double beta_end) {
  if (steps < 1) throw ValidationError("schedule steps must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw ValidationError("linear beta schedule needs 0 < beta_start <= beta_end < 1");
  }
  std::vector<double> betas(static_cast<std::size_t>(steps));
  if (steps == 1) {
    betas[0] = beta_start;
  } else {
    const double span = beta_end - beta_start;
    for (int t = 1; t <= steps; ++t) {
      betas[static_cast<std::size_t>(t - 1)] =
          beta_start + span * static_cast<double>(t - 1) / static_cast<double>(steps - 1);
    }
  }
  return DiffusionSchedule(std::move(betas));
}

Trajectory::Trajectory(std::vector<int> steps, int max_step)
    : steps_(std::move(steps)), max_step_(max_step) {
  if (steps_.empty()) throw ValidationError("trajectory is empty");
  if (steps_.front() > max_step_) throw ValidationError("trajectory starts above T");
  if (steps_.back() < 1) throw ValidationError("trajectory must end at a level >= 1");
  for (std::size_t i = 1; i < steps_.size(); ++i) {
    if (steps_[i] >= steps_[i - 1]) throw ValidationError("trajectory must be strictly decreasing");
  }
}

bool Trajectory::is_consecutive() const {
  if (steps_.front() != max_step_ || steps_.back() != 1) return false;
  return static_cast<int>(steps_.size()) == max_step_;
}

Trajectory make_trajectory(int steps, int n_steps) {
  if (steps < 1) throw ValidationError("T must be >= 1");
  if (n_steps < 1 || n_steps > steps) {
    throw ValidationError("n_steps must be in [1, T], got " + std::to_string(n_steps));
  }
  const int stride = steps / n_steps;
  std::vector<int> out(static_cast<std::size_t>(n_steps));
  for (int i = 0; i < n_steps; ++i) out[static_cast<std::size_t>(i)] = steps - i * stride;
  return Trajectory(std::move(out), steps);
}

Grid forward_diffuse(const Grid& x0, int t, const Grid& eps, const DiffusionSchedule& schedule) {
  require_same_shape(x0, eps, "forward_diffuse");
  const double ab = schedule.alpha_bar(t);
  if (t == 0) return x0;
  Grid out(x0.shape());
  simd::kernels().axpby(std::sqrt(ab), x0.data(), std::sqrt(1.0 - ab), eps.data(), out.data(),
                        x0.size());
  return out;
}

}  // namespace fovdiff
