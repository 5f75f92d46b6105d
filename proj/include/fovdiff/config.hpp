// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fovdiff/denoiser.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/fov.hpp"
#include "fovdiff/metrics.hpp"
#include "fovdiff/mlp.hpp"
#include "fovdiff/samplers.hpp"

namespace fovdiff {

// Configuration problem tied to one key (and a line when read from a file).
class ConfigError : public ValidationError {
 public:
  ConfigError(std::string key, const std::string& message)
      : ValidationError(key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class DenoiserKind { kGmm, kMlp };

struct RunConfig {
  struct Schedule {
    int steps = 1000;
    double beta_start = kDefaultBetaStart;
    double beta_end = kDefaultBetaEnd;
  } schedule;

  struct Sampler {
    SamplerVariant variant = SamplerVariant::kDdim;
    int n_steps = 50;
    int resample_count = 20;
    std::uint64_t seed = 0;
    bool reuse_eps = true;
    bool clip_x0 = false;  // clamp clean estimates to [-1, 1]
    std::size_t count = 1;
  } sampler;

  struct Denoiser {
    DenoiserKind kind = DenoiserKind::kGmm;
    GaussianMixture gmm = GaussianMixture::isotropic(1, 0.0, 1.0);
    std::string checkpoint;
  } denoiser;

  TrainConfig train;
  std::size_t train_count = 2000;  // phantoms generated for training

  struct Data {
    PhantomConfig phantom;
    TruncationConfig truncation;
    std::size_t count = 50;
    std::uint64_t seed = 0;
    double hu_low = -1000.0;
    double hu_high = 600.0;
  } data;

  struct Metrics {
    SatOptions sat;
    std::vector<double> tci_bins = kDefaultTciBinEdges;
  } metrics;

  struct Output {
    std::string dir = "out";
    int dump_every = 0;
  } output;

  // Throws ConfigError naming the first offending key.
  void validate() const;
};

// Flat "section.key = value" lines; '#' starts a comment. Unknown or repeated
// keys are errors. Missing keys keep their defaults.
RunConfig parse_config_text(std::string_view text, const std::string& source = "<config>");
RunConfig parse_config(const std::string& path);

// Every key, one per line, in a form parse_config_text reads back identically.
std::string config_to_text(const RunConfig& config);

// DIFG_SEED, when set, replaces the sampler, data and training seeds.
void apply_env_overrides(RunConfig& config);

const char* to_string(SamplerVariant variant);

}  // namespace fovdiff
