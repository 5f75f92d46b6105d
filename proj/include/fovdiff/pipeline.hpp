// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "fovdiff/config.hpp"
#include "fovdiff/denoiser.hpp"
#include "fovdiff/metrics.hpp"
#include "fovdiff/mlp.hpp"
#include "fovdiff/schedule.hpp"

namespace fovdiff {

using ProgressFn = std::function<void(const std::string&)>;

DiffusionSchedule schedule_from_config(const RunConfig& config);

// GMM prior from the config, or the MLP checkpoint it names.
std::unique_ptr<Denoiser> make_denoiser(const RunConfig& config);

// Pristine phantoms for training; seeded independently of the evaluation split.
std::vector<Grid> generate_training_set(const RunConfig& config, std::size_t workers = 1);

TrainResult train_from_config(const RunConfig& config, const std::vector<Grid>& data,
                              const ProgressFn& progress = {});

// Conditional sampling with the configured variant (repaint-ddim or
// repaint-ddpm). `dump` receives intermediate states every
// output.dump_every outer steps when set.
Grid inpaint(const RunConfig& config, const Denoiser& denoiser, const DiffusionSchedule& schedule,
             const Grid& observed, const Grid& mask, Rng& noise, Rng& resample_noise,
             const StepObserver& dump = {});

// Unconditional samples, sample i seeded from (sampler.seed, i).
std::vector<Grid> sample_from_config(const RunConfig& config, const Denoiser& denoiser,
                                     const DiffusionSchedule& schedule, const Grid::Shape& shape,
                                     std::size_t count, std::size_t workers);

// Writes <completed_dir>/<id>.completed.difg for every manifest entry.
void inpaint_dataset(const RunConfig& config, const Denoiser& denoiser,
                     const DiffusionSchedule& schedule, const std::string& dataset_dir,
                     const std::string& completed_dir, std::size_t workers,
                     const ProgressFn& progress = {});

struct BenchmarkResult {
  AgreementReport report;
  std::vector<std::string> missing;
  bool trained = false;
  double initial_loss = 0.0;  // mean of the first training window
  double final_loss = 0.0;    // mean of the last training window
};

/// simulate -> (train) -> inpaint -> evaluate under config.output.dir.
/// Trains an MLP when denoiser.kind is mlp and no checkpoint is configured.
BenchmarkResult run_benchmark(const RunConfig& config, std::size_t workers,
                              const ProgressFn& progress = {});

// Mean loss over the first and last `window` iterations.
std::pair<double, double> loss_window_means(const std::vector<double>& losses, std::size_t window);

}  // namespace fovdiff
