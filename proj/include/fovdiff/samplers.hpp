// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "fovdiff/denoiser.hpp"
#include "fovdiff/grid.hpp"
#include "fovdiff/rng.hpp"
#include "fovdiff/schedule.hpp"

namespace fovdiff {

enum class SamplerVariant { kDdpm, kDdim };

/// Observed image and its mask (1 = known, 0 = to be generated).
struct KnownRegion {
  Grid image;
  Grid mask;
};

// Closed interval the clean-image estimate is clamped to before use.
struct ClipRange {
  double low;
  double high;
};

// Called after each outer step with the level reached and the state there.
using StepObserver = std::function<void(int level, const Grid& state)>;

/// Everything a sampler needs for one sample.
///
/// Two noise streams are kept apart: `noise` supplies x_T and the DDPM
/// ancestral noise, `resample_noise` supplies every draw that only exists
/// because of conditioning (renoising of the clean estimate, forward noise for
/// the known region). With an all-zero mask and one resampling pass the
/// conditional samplers therefore consume `noise` exactly like their
/// unconditional counterparts.
struct SamplerRun {
  const Denoiser& denoiser;
  const DiffusionSchedule& schedule;
  Trajectory trajectory;
  NormalSource& noise;
  NormalSource& resample_noise;
  Grid::Shape shape{};  // state shape; taken from known.image when present
  int resample_count = 1;
  std::optional<KnownRegion> known{};
  // Reuse the final inner eps evaluation for the outer DDIM update instead of
  // calling the denoiser again on the same (x_t, t).
  bool reuse_eps = true;
  // Applies to the DDIM-family samplers only; the DDPM update never forms x0.
  std::optional<ClipRange> clip_x0{};
  StepObserver observer{};
};

// Deterministic DDIM update from level t to t_prev (< t).
Grid ddim_step(const Denoiser& denoiser, const Grid& x_t, int t, int t_prev,
               const DiffusionSchedule& schedule, std::optional<ClipRange> clip_x0 = {});

// Ancestral DDPM update from t to t - 1; adds noise only for t > 1.
Grid ddpm_step(const Denoiser& denoiser, const Grid& x_t, int t, const DiffusionSchedule& schedule,
               NormalSource& noise);

// Unconditional sampling from x_T ~ N(0, I). DDPM requires a consecutive trajectory.
Grid sample(const SamplerRun& run, SamplerVariant variant);

/// Resampling inpainting on the DDIM trajectory.
///
/// At every trajectory level t the clean-image estimate is formed, its known
/// region overwritten with the observation, and (for all but the last of U
/// passes) the result is renoised straight back to level t and denoised
/// again. The final estimate then drives one deterministic DDIM jump to the
/// next level. Because the last jump lands on alpha_bar = 1, the known region
/// of the output equals the observation.
Grid repaint_ddim(const SamplerRun& run);

/// Resampling inpainting on the consecutive DDPM chain: the known region of
/// x_{t-1} is a fresh forward sample of the observation, and each extra pass
/// diffuses x_{t-1} one level back to t before denoising again.
Grid repaint_ddpm(const SamplerRun& run);

// Sample i of a batch gets Rng(seed, 2i) as main noise and Rng(seed, 2i + 1)
// for resampling noise, so results do not depend on `workers`.
using BatchSampleFn = std::function<Grid(std::size_t index, Rng& noise, Rng& resample_noise)>;
std::vector<Grid> run_batch(std::size_t count, std::uint64_t seed, std::size_t workers,
                            const BatchSampleFn& fn);

}  // namespace fovdiff
