// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fovdiff/error.hpp"
#include "fovdiff/parallel.hpp"
#include "fovdiff/simd/kernels.hpp"

namespace fovdiff {

namespace {

// sqrt(abar_prev) x0 + sqrt(1 - abar_prev) eps; at abar_prev == 1 this is x0.
Grid ddim_update(const Grid& x0, const Grid& eps, double alpha_bar_prev) {
  if (alpha_bar_prev == 1.0) return x0;
  Grid out(x0.shape());
  simd::kernels().axpby(std::sqrt(alpha_bar_prev), x0.data(), std::sqrt(1.0 - alpha_bar_prev),
                        eps.data(), out.data(), x0.size());
  return out;
}

void clip(Grid& x0, const std::optional<ClipRange>& range) {
  if (!range) return;
  for (double& v : x0.values()) v = std::clamp(v, range->low, range->high);
}

Grid replace_known(const Grid& estimate, const KnownRegion& known) {
  Grid out(estimate.shape());
  simd::kernels().select(known.mask.data(), known.image.data(), estimate.data(), out.data(),
                         estimate.size());
  return out;
}

Grid draw(NormalSource& source, const Grid::Shape& shape) {
  Grid g(shape);
  source.fill_normal(g.values());
  return g;
}

Grid::Shape state_shape(const SamplerRun& run) {
  return run.known ? run.known->image.shape() : run.shape;
}

void validate_run(const SamplerRun& run) {
  if (run.trajectory.max_step() != run.schedule.steps()) {
    throw ValidationError("trajectory was built for T=" + std::to_string(run.trajectory.max_step()) +
                          " but schedule has T=" + std::to_string(run.schedule.steps()));
  }
  if (run.resample_count < 1) throw ValidationError("resample count U must be >= 1");
  if (run.clip_x0 && !(run.clip_x0->low < run.clip_x0->high)) {
    throw ValidationError("clip range needs low < high");
  }
  if (run.known) {
    require_same_shape(run.known->image, run.known->mask, "known image vs mask");
    for (double m : run.known->mask.values()) {
      if (m != 0.0 && m != 1.0) throw ValidationError("mask values must be 0 or 1");
    }
  } else if (run.shape.size() == 0) {
    throw ValidationError("sampler run has an empty state shape");
  }
}

void require_consecutive(const SamplerRun& run, const char* who) {
  if (!run.trajectory.is_consecutive()) {
    throw ValidationError(std::string(who) + " needs the consecutive trajectory T, T-1, ..., 1");
  }
}

void notify(const SamplerRun& run, int level, const Grid& state) {
  if (run.observer) run.observer(level, state);
}

}  // namespace

Grid ddim_step(const Denoiser& denoiser, const Grid& x_t, int t, int t_prev,
               const DiffusionSchedule& schedule, std::optional<ClipRange> clip_x0) {
  if (!(t > t_prev && t_prev >= 0)) throw ValidationError("ddim_step needs t > t_prev >= 0");
  X0Prediction pred = predict_x0(denoiser, x_t, t, schedule);
  clip(pred.x0, clip_x0);
  return ddim_update(pred.x0, pred.eps, schedule.alpha_bar(t_prev));
}

Grid ddpm_step(const Denoiser& denoiser, const Grid& x_t, int t, const DiffusionSchedule& schedule,
               NormalSource& noise) {
  if (t < 1) throw ValidationError("ddpm_step needs t >= 1");
  const Grid eps = denoiser.predict_eps(x_t, t, schedule);
  require_same_shape(x_t, eps, "denoiser output");
  const double beta = schedule.beta(t);
  const double ab = schedule.alpha_bar(t);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(1.0 - beta);
  Grid out(x_t.shape());
  simd::kernels().axpby(inv_sqrt_alpha, x_t.data(), -inv_sqrt_alpha * beta / std::sqrt(1.0 - ab),
                        eps.data(), out.data(), x_t.size());
  if (t > 1) {
    const double sigma = std::sqrt(beta * (1.0 - schedule.alpha_bar(t - 1)) / (1.0 - ab));
    const Grid z = draw(noise, x_t.shape());
    simd::kernels().axpby(1.0, out.data(), sigma, z.data(), out.data(), out.size());
  }
  return out;
}

Grid sample(const SamplerRun& run, SamplerVariant variant) {
  validate_run(run);
  if (run.known) throw ValidationError("unconditional sampling takes no known region");
  if (variant == SamplerVariant::kDdpm) require_consecutive(run, "DDPM sampling");

  Grid x = draw(run.noise, run.shape);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const int t = run.trajectory[i];
    if (variant == SamplerVariant::kDdpm) {
      x = ddpm_step(run.denoiser, x, t, run.schedule, run.noise);
    } else {
      x = ddim_step(run.denoiser, x, t, run.trajectory.prev(i), run.schedule, run.clip_x0);
    }
    notify(run, run.trajectory.prev(i), x);
  }
  return x;
}

Grid repaint_ddim(const SamplerRun& run) {
  validate_run(run);
  if (!run.known) throw ValidationError("repaint_ddim needs a known region");
  const KnownRegion& known = *run.known;
  const Grid::Shape shape = state_shape(run);
  const auto& k = simd::kernels();

  Grid x = draw(run.noise, shape);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const int t = run.trajectory[i];
    const int t_prev = run.trajectory.prev(i);
    const double ab = run.schedule.alpha_bar(t);
    const double signal = std::sqrt(ab);
    const double noise_scale = std::sqrt(1.0 - ab);

    Grid x0_hat;
    Grid eps_hat;
    for (int u = 1; u <= run.resample_count; ++u) {
      X0Prediction pred = predict_x0(run.denoiser, x, t, run.schedule);
      clip(pred.x0, run.clip_x0);
      x0_hat = replace_known(pred.x0, known);
      eps_hat = std::move(pred.eps);
      if (u < run.resample_count) {
        const Grid e = draw(run.resample_noise, shape);
        k.axpby(signal, x0_hat.data(), noise_scale, e.data(), x.data(), x.size());
      }
    }
    // eps_hat was computed on the current x at level t, which the last pass left untouched.
    if (!run.reuse_eps) eps_hat = run.denoiser.predict_eps(x, t, run.schedule);
    x = ddim_update(x0_hat, eps_hat, run.schedule.alpha_bar(t_prev));
    notify(run, t_prev, x);
  }
  return x;
}

Grid repaint_ddpm(const SamplerRun& run) {
  validate_run(run);
  if (!run.known) throw ValidationError("repaint_ddpm needs a known region");
  require_consecutive(run, "repaint_ddpm");
  const KnownRegion& known = *run.known;
  const Grid::Shape shape = state_shape(run);
  const auto& k = simd::kernels();

  Grid x = draw(run.noise, shape);
  for (std::size_t i = 0; i < run.trajectory.size(); ++i) {
    const int t = run.trajectory[i];
    const double beta = run.schedule.beta(t);
    Grid x_prev;
    for (int u = 1; u <= run.resample_count; ++u) {
      const Grid known_prev =
          forward_diffuse(known.image, t - 1, draw(run.resample_noise, shape), run.schedule);
      const Grid generated = ddpm_step(run.denoiser, x, t, run.schedule, run.noise);
      x_prev = Grid(shape);
      k.select(known.mask.data(), known_prev.data(), generated.data(), x_prev.data(),
               x_prev.size());
      if (u < run.resample_count) {
        // one forward diffusion step t-1 -> t
        const Grid z = draw(run.resample_noise, shape);
        k.axpby(std::sqrt(1.0 - beta), x_prev.data(), std::sqrt(beta), z.data(), x.data(),
                x.size());
      }
    }
    x = std::move(x_prev);
    notify(run, t - 1, x);
  }
  return x;
}

std::vector<Grid> run_batch(std::size_t count, std::uint64_t seed, std::size_t workers,
                            const BatchSampleFn& fn) {
  std::vector<Grid> out(count);
  parallel_for(count, workers, [&](std::size_t i) {
    Rng noise(seed, 2 * i);
    Rng resample(seed, 2 * i + 1);
    out[i] = fn(i, noise, resample);
  });
  return out;
}

}  // namespace fovdiff
