// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "fovdiff/denoiser.hpp"
#include "fovdiff/grid.hpp"
#include "fovdiff/rng.hpp"
#include "fovdiff/schedule.hpp"

namespace fovdiff {

struct DenseLayer {
  std::size_t rows = 0;  // outputs
  std::size_t cols = 0;  // inputs
  std::vector<double> weights;  // row-major rows x cols
  std::vector<double> bias;     // rows
};

/// Fully connected eps-prediction network. Input is [x_t, time embedding],
/// hidden layers use SiLU, the output layer is linear.
struct MlpParams {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().cols; }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().rows; }
  std::size_t embed_dim() const { return input_dim() - output_dim(); }
  std::size_t parameter_count() const;

  // Same layer shapes, all values zero.
  MlpParams zeros_like() const;

  // Throws ValidationError if the layer shapes do not chain, the embedding
  // width is not a positive even number or any entry is non-finite.
  void validate() const;

  bool operator==(const MlpParams& other) const;  // bitwise
};

// Glorot-uniform weights, zero biases. Layer widths: data_dim + embed_dim,
// hidden..., data_dim.
MlpParams init_mlp(std::size_t data_dim, std::size_t embed_dim,
                   std::span<const std::size_t> hidden, std::uint64_t seed);

// Pairs (sin(t w_k), cos(t w_k)), w_k geometric from 1/T to 1.
std::vector<double> time_embedding(int t, int total_steps, std::size_t embed_dim);

Grid mlp_eps(const MlpParams& params, const Grid& x_t, int t, int total_steps);

class MlpDenoiser : public Denoiser {
 public:
  explicit MlpDenoiser(MlpParams params);
  Grid predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const override;
  const MlpParams& params() const { return params_; }

 private:
  MlpParams params_;
};

// Noise level and noise vector for one training example.
struct TrainingDraw {
  int t = 1;
  std::vector<double> eps;
};

std::vector<TrainingDraw> draw_training_noise(std::size_t batch, std::size_t dim, int total_steps,
                                              Rng& rng);

struct LossAndGrad {
  double loss = 0.0;
  MlpParams grads;
};

// Mean over the batch of ||eps - eps_hat(x_t, t)||^2 and its exact gradient,
// with the noise draws fixed.
LossAndGrad loss_and_grad(const MlpParams& params, std::span<const Grid> x0_batch,
                          std::span<const TrainingDraw> draws, const DiffusionSchedule& schedule);

// Draws t ~ U{1..T} and eps ~ N(0, I) per example from `rng`, then as above.
LossAndGrad loss_and_grad(const MlpParams& params, std::span<const Grid> x0_batch,
                          const DiffusionSchedule& schedule, Rng& rng);

double loss_only(const MlpParams& params, std::span<const Grid> x0_batch,
                 std::span<const TrainingDraw> draws, const DiffusionSchedule& schedule);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t batch_size = 64;
  std::size_t iterations = 5000;
  std::uint64_t seed = 0;
  std::size_t embed_dim = 16;
  std::vector<std::size_t> hidden{128, 128};
  std::size_t log_every = 500;

  void validate() const;
};

/// Adam with beta1 = 0.9, beta2 = 0.999, eps = 1e-8.
class AdamOptimizer {
 public:
  explicit AdamOptimizer(const MlpParams& shape_like, double learning_rate);
  void step(MlpParams& params, const MlpParams& grads);
  std::size_t steps_taken() const { return steps_; }

 private:
  double lr_;
  std::size_t steps_ = 0;
  MlpParams m_;
  MlpParams v_;
};

struct TrainResult {
  MlpParams params;
  std::vector<double> losses;  // one entry per iteration
};

using TrainLogger = std::function<void(std::size_t iteration, double loss)>;

// Deterministic from config.seed. Throws NumericError on a non-finite loss.
TrainResult train(std::span<const Grid> data, const TrainConfig& config,
                  const DiffusionSchedule& schedule, const TrainLogger& log = {});

// Checkpoint layout: "RPDM", u32 version, u32 layer count, then per layer
// u32 rows, u32 cols, rows*cols f64 weights, rows f64 biases. Little-endian.
inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string encode_checkpoint(const MlpParams& params);
MlpParams decode_checkpoint(std::string_view bytes);
void write_checkpoint(const MlpParams& params, const std::string& path);
MlpParams read_checkpoint(const std::string& path);

}  // namespace fovdiff
