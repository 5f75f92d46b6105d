// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>

#include "binary_io.hpp"
#include "fovdiff/dataset.hpp"
#include "fovdiff/grid_io.hpp"
#include "fovdiff/parallel.hpp"

namespace fovdiff {

namespace {

constexpr std::uint64_t kTrainingStream = 0x7472'6169'6e00ULL;

}  // namespace

DiffusionSchedule schedule_from_config(const RunConfig& config) {
  return linear_beta_schedule(config.schedule.steps, config.schedule.beta_start,
                              config.schedule.beta_end);
}

std::unique_ptr<Denoiser> make_denoiser(const RunConfig& config) {
  if (config.denoiser.kind == DenoiserKind::kGmm) {
    return std::make_unique<GmmDenoiser>(config.denoiser.gmm);
  }
  if (config.denoiser.checkpoint.empty()) {
    throw ConfigError("denoiser.checkpoint", "required when denoiser.kind = mlp");
  }
  return std::make_unique<MlpDenoiser>(read_checkpoint(config.denoiser.checkpoint));
}

std::vector<Grid> generate_training_set(const RunConfig& config, std::size_t workers) {
  std::vector<Grid> data(config.train_count);
  const std::uint64_t seed = derive_seed(config.data.seed, kTrainingStream);
  parallel_for(data.size(), workers, [&](std::size_t i) {
    Rng rng(seed, i);
    data[i] = generate_phantom(rng, config.data.phantom).image;
  });
  return data;
}

TrainResult train_from_config(const RunConfig& config, const std::vector<Grid>& data,
                              const ProgressFn& progress) {
  const DiffusionSchedule schedule = schedule_from_config(config);
  TrainLogger log;
  if (progress) {
    log = [&](std::size_t it, double loss) {
      progress("train iteration " + std::to_string(it) + " loss " + std::to_string(loss));
    };
  }
  return train(data, config.train, schedule, log);
}

namespace {

std::optional<ClipRange> clip_range(const RunConfig& config) {
  if (!config.sampler.clip_x0) return std::nullopt;
  return ClipRange{-1.0, 1.0};
}

}  // namespace

Grid inpaint(const RunConfig& config, const Denoiser& denoiser, const DiffusionSchedule& schedule,
             const Grid& observed, const Grid& mask, Rng& noise, Rng& resample_noise,
             const StepObserver& dump) {
  const bool ddim = config.sampler.variant == SamplerVariant::kDdim;
  SamplerRun run{
      .denoiser = denoiser,
      .schedule = schedule,
      .trajectory = ddim ? make_trajectory(schedule.steps(), config.sampler.n_steps)
                         : make_trajectory(schedule.steps(), schedule.steps()),
      .noise = noise,
      .resample_noise = resample_noise,
      .shape = observed.shape(),
      .resample_count = config.sampler.resample_count,
      .known = KnownRegion{observed, mask},
      .reuse_eps = config.sampler.reuse_eps,
      .clip_x0 = clip_range(config),
  };
  if (dump && config.output.dump_every > 0) {
    auto step = std::make_shared<int>(0);
    const int every = config.output.dump_every;
    run.observer = [dump, step, every](int level, const Grid& state) {
      if (++*step % every == 0 || level == 0) dump(level, state);
    };
  }
  if (!ddim && config.sampler.n_steps != schedule.steps()) {
    throw ConfigError("sampler.n_steps", "repaint-ddpm runs every level; set n_steps = T");
  }
  return ddim ? repaint_ddim(run) : repaint_ddpm(run);
}

std::vector<Grid> sample_from_config(const RunConfig& config, const Denoiser& denoiser,
                                     const DiffusionSchedule& schedule, const Grid::Shape& shape,
                                     std::size_t count, std::size_t workers) {
  const SamplerVariant variant = config.sampler.variant;
  if (variant == SamplerVariant::kDdpm && config.sampler.n_steps != schedule.steps()) {
    throw ConfigError("sampler.n_steps", "ddpm runs every level; set n_steps = T");
  }
  const Trajectory trajectory = make_trajectory(schedule.steps(), config.sampler.n_steps);
  return run_batch(count, config.sampler.seed, workers,
                   [&](std::size_t, Rng& noise, Rng& resample) {
                     SamplerRun run{denoiser, schedule, trajectory, noise, resample, shape};
                     run.clip_x0 = clip_range(config);
                     return sample(run, variant);
                   });
}

void inpaint_dataset(const RunConfig& config, const Denoiser& denoiser,
                     const DiffusionSchedule& schedule, const std::string& dataset_dir,
                     const std::string& completed_dir, std::size_t workers,
                     const ProgressFn& progress) {
  const DatasetManifest manifest = read_manifest(dataset_dir);
  std::filesystem::create_directories(completed_dir);
  std::vector<Grid> observed(manifest.samples.size());
  std::vector<Grid> masks(manifest.samples.size());
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const std::string& id = manifest.samples[i].id;
    observed[i] = read_grid(sample_path(dataset_dir, id, "truncated"));
    masks[i] = read_grid(sample_path(dataset_dir, id, "mask"));
  }
  const auto completed =
      run_batch(manifest.samples.size(), config.sampler.seed, workers,
                [&](std::size_t i, Rng& noise, Rng& resample) {
                  Grid out = inpaint(config, denoiser, schedule, observed[i], masks[i], noise,
                                     resample);
                  write_grid(sample_path(completed_dir, manifest.samples[i].id, "completed"), out);
                  return out;
                });
  if (progress) progress("inpainted " + std::to_string(completed.size()) + " samples");
}

std::pair<double, double> loss_window_means(const std::vector<double>& losses, std::size_t window) {
  if (losses.empty()) return {0.0, 0.0};
  window = std::clamp<std::size_t>(window, 1, losses.size());
  const double first =
      std::accumulate(losses.begin(), losses.begin() + static_cast<std::ptrdiff_t>(window), 0.0);
  const double last =
      std::accumulate(losses.end() - static_cast<std::ptrdiff_t>(window), losses.end(), 0.0);
  return {first / static_cast<double>(window), last / static_cast<double>(window)};
}

BenchmarkResult run_benchmark(const RunConfig& config, std::size_t workers,
                              const ProgressFn& progress) {
  namespace fs = std::filesystem;
  const fs::path root(config.output.dir);
  const std::string dataset_dir = (root / "dataset").string();
  const std::string completed_dir = (root / "completed").string();
  const DiffusionSchedule schedule = schedule_from_config(config);

  if (progress) progress("simulating " + std::to_string(config.data.count) + " phantoms");
  simulate_dataset(dataset_dir, "benchmark", config.data.count, config.data.seed,
                   config.data.phantom, config.data.truncation, workers);

  BenchmarkResult result;
  RunConfig effective = config;
  if (config.denoiser.kind == DenoiserKind::kMlp && config.denoiser.checkpoint.empty()) {
    if (progress) progress("training denoiser on " + std::to_string(config.train_count) + " phantoms");
    const auto data = generate_training_set(config, workers);
    const TrainResult trained = train_from_config(config, data, progress);
    const std::string ckpt = (root / "denoiser.rpdm").string();
    write_checkpoint(trained.params, ckpt);
    effective.denoiser.checkpoint = ckpt;
    result.trained = true;
    std::tie(result.initial_loss, result.final_loss) = loss_window_means(trained.losses, 100);
  }
  const auto denoiser = make_denoiser(effective);

  if (progress) progress("inpainting");
  inpaint_dataset(effective, *denoiser, schedule, dataset_dir, completed_dir, workers, progress);

  if (progress) progress("evaluating");
  EvaluationResult eval =
      evaluate_dataset(dataset_dir, completed_dir, config.metrics.sat, config.metrics.tci_bins);
  detail::write_file_bytes((root / "report.json").string(), report_to_json(eval.report));
  detail::write_file_bytes((root / "report.csv").string(), records_to_csv(eval.report.records));
  result.report = std::move(eval.report);
  result.missing = std::move(eval.missing);
  return result;
}

}  // namespace fovdiff
