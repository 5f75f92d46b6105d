// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "binary_io.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/simd/kernels.hpp"

namespace fovdiff {

namespace {

inline double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

inline double silu(double z) { return z * sigmoid(z); }

inline double silu_grad(double z) {
  const double s = sigmoid(z);
  return s * (1.0 + z * (1.0 - s));
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         (a.empty() || std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
}

std::vector<double> network_input(const MlpParams& params, std::span<const double> x, int t,
                                  int total_steps) {
  std::vector<double> in(params.input_dim());
  std::copy(x.begin(), x.end(), in.begin());
  const auto emb = time_embedding(t, total_steps, params.embed_dim());
  std::copy(emb.begin(), emb.end(), in.begin() + static_cast<std::ptrdiff_t>(x.size()));
  return in;
}

std::vector<double> forward(const MlpParams& params, std::vector<double> in) {
  const auto& k = simd::kernels();
  const std::size_t n_layers = params.layers.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    std::vector<double> z(layer.rows);
    k.gemv(layer.weights.data(), layer.rows, layer.cols, in.data(), layer.bias.data(), z.data());
    if (l + 1 < n_layers) {
      for (double& v : z) v = silu(v);
    }
    in = std::move(z);
  }
  return in;
}

void require_batch(const MlpParams& params, std::span<const Grid> batch,
                   std::span<const TrainingDraw> draws) {
  if (batch.empty()) throw ValidationError("training batch is empty");
  if (draws.size() != batch.size()) throw ValidationError("one noise draw needed per example");
  for (std::size_t i = 0; i < batch.size(); ++i) {
    if (batch[i].size() != params.output_dim() || draws[i].eps.size() != params.output_dim()) {
      throw ShapeError("training example size does not match network output dimension");
    }
  }
}

std::vector<double> noisy_input(const Grid& x0, const TrainingDraw& draw,
                                const DiffusionSchedule& schedule) {
  const double ab = schedule.alpha_bar(draw.t);
  std::vector<double> x(x0.size());
  simd::kernels().axpby(std::sqrt(ab), x0.data(), std::sqrt(1.0 - ab), draw.eps.data(), x.data(),
                        x.size());
  return x;
}

}  // namespace

std::size_t MlpParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

MlpParams MlpParams::zeros_like() const {
  MlpParams out;
  out.layers.reserve(layers.size());
  for (const auto& layer : layers) {
    out.layers.push_back(DenseLayer{layer.rows, layer.cols,
                                    std::vector<double>(layer.weights.size(), 0.0),
                                    std::vector<double>(layer.bias.size(), 0.0)});
  }
  return out;
}

void MlpParams::validate() const {
  if (layers.empty()) throw ValidationError("network has no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.rows == 0 || layer.cols == 0) throw ValidationError("network layer has zero width");
    if (layer.weights.size() != layer.rows * layer.cols || layer.bias.size() != layer.rows) {
      throw ValidationError("network layer " + std::to_string(l) + " has inconsistent storage");
    }
    if (l > 0 && layers[l - 1].rows != layer.cols) {
      throw ValidationError("network layer " + std::to_string(l) + " does not chain");
    }
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(layer.weights.begin(), layer.weights.end(), finite) ||
        !std::all_of(layer.bias.begin(), layer.bias.end(), finite)) {
      throw ValidationError("network layer " + std::to_string(l) + " has non-finite entries");
    }
  }
  if (input_dim() <= output_dim() || embed_dim() % 2 != 0) {
    throw ValidationError("network input must be data plus an even-width time embedding");
  }
}

bool MlpParams::operator==(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& a = layers[l];
    const auto& b = other.layers[l];
    if (a.rows != b.rows || a.cols != b.cols || !bitwise_equal(a.weights, b.weights) ||
        !bitwise_equal(a.bias, b.bias)) {
      return false;
    }
  }
  return true;
}

MlpParams init_mlp(std::size_t data_dim, std::size_t embed_dim,
                   std::span<const std::size_t> hidden, std::uint64_t seed) {
  if (data_dim == 0) throw ValidationError("data dimension must be positive");
  if (embed_dim < 2 || embed_dim % 2 != 0) {
    throw ValidationError("embed_dim must be even and >= 2");
  }
  std::vector<std::size_t> widths{data_dim + embed_dim};
  widths.insert(widths.end(), hidden.begin(), hidden.end());
  widths.push_back(data_dim);

  Rng rng(seed, 0x1417);
  MlpParams params;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const std::size_t cols = widths[l];
    const std::size_t rows = widths[l + 1];
    if (rows == 0) throw ValidationError("hidden width must be positive");
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    DenseLayer layer{rows, cols, std::vector<double>(rows * cols), std::vector<double>(rows, 0.0)};
    for (double& w : layer.weights) w = rng.uniform(-limit, limit);
    params.layers.push_back(std::move(layer));
  }
  return params;
}

std::vector<double> time_embedding(int t, int total_steps, std::size_t embed_dim) {
  if (embed_dim < 2 || embed_dim % 2 != 0) {
    throw ValidationError("embed_dim must be even and >= 2");
  }
  if (total_steps < 1 || t < 0 || t > total_steps) {
    throw ValidationError("time embedding needs 0 <= t <= T");
  }
  const std::size_t pairs = embed_dim / 2;
  const double lowest = 1.0 / static_cast<double>(total_steps);
  std::vector<double> out(embed_dim);
  for (std::size_t k = 0; k < pairs; ++k) {
    const double frac = pairs == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(pairs - 1);
    const double omega = std::pow(lowest, 1.0 - frac);
    out[2 * k] = std::sin(t * omega);
    out[2 * k + 1] = std::cos(t * omega);
  }
  return out;
}

Grid mlp_eps(const MlpParams& params, const Grid& x_t, int t, int total_steps) {
  if (x_t.size() != params.output_dim()) {
    throw ShapeError("network expects " + std::to_string(params.output_dim()) +
                     " values, got " + std::to_string(x_t.size()));
  }
  auto out = forward(params, network_input(params, x_t.values(), t, total_steps));
  Grid eps(x_t.shape());
  std::copy(out.begin(), out.end(), eps.values().begin());
  return eps;
}

MlpDenoiser::MlpDenoiser(MlpParams params) : params_(std::move(params)) { params_.validate(); }

Grid MlpDenoiser::predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const {
  if (t < 1 || t > schedule.steps()) {
    throw ValidationError("denoiser evaluated at t=" + std::to_string(t) + ", needs 1 <= t <= T");
  }
  return mlp_eps(params_, x_t, t, schedule.steps());
}

std::vector<TrainingDraw> draw_training_noise(std::size_t batch, std::size_t dim, int total_steps,
                                              Rng& rng) {
  std::vector<TrainingDraw> draws(batch);
  for (auto& d : draws) {
    d.t = rng.uniform_int(1, total_steps);
    d.eps.resize(dim);
    rng.fill_normal(d.eps);
  }
  return draws;
}

double loss_only(const MlpParams& params, std::span<const Grid> x0_batch,
                 std::span<const TrainingDraw> draws, const DiffusionSchedule& schedule) {
  require_batch(params, x0_batch, draws);
  double total = 0.0;
  for (std::size_t i = 0; i < x0_batch.size(); ++i) {
    const auto x = noisy_input(x0_batch[i], draws[i], schedule);
    const auto out =
        forward(params, network_input(params, x, draws[i].t, schedule.steps()));
    for (std::size_t j = 0; j < out.size(); ++j) {
      const double r = out[j] - draws[i].eps[j];
      total += r * r;
    }
  }
  return total / static_cast<double>(x0_batch.size());
}

LossAndGrad loss_and_grad(const MlpParams& params, std::span<const Grid> x0_batch,
                          std::span<const TrainingDraw> draws, const DiffusionSchedule& schedule) {
  require_batch(params, x0_batch, draws);
  const auto& k = simd::kernels();
  const std::size_t batch = x0_batch.size();
  const double inv_batch = 1.0 / static_cast<double>(batch);
  const std::size_t n_layers = params.layers.size();
  LossAndGrad result{0.0, params.zeros_like()};

  // acts[l] is the B x cols input of layer l; pre[l] its B x rows output.
  std::vector<std::vector<double>> acts(n_layers);
  std::vector<std::vector<double>> pre(n_layers);
  const std::size_t in_dim = params.input_dim();
  acts[0].resize(batch * in_dim);
  for (std::size_t i = 0; i < batch; ++i) {
    const auto in = network_input(params, noisy_input(x0_batch[i], draws[i], schedule), draws[i].t,
                                  schedule.steps());
    std::copy(in.begin(), in.end(), acts[0].begin() + static_cast<std::ptrdiff_t>(i * in_dim));
  }
  for (std::size_t l = 0; l < n_layers; ++l) {
    const DenseLayer& layer = params.layers[l];
    pre[l].resize(batch * layer.rows);
    k.gemm_nt(acts[l].data(), batch, layer.cols, layer.weights.data(), layer.rows,
              layer.bias.data(), pre[l].data());
    if (l + 1 < n_layers) {
      acts[l + 1].resize(pre[l].size());
      std::transform(pre[l].begin(), pre[l].end(), acts[l + 1].begin(), silu);
    }
  }

  const std::size_t out_dim = params.output_dim();
  std::vector<double> delta(batch * out_dim);
  for (std::size_t i = 0; i < batch; ++i) {
    for (std::size_t j = 0; j < out_dim; ++j) {
      const double r = pre[n_layers - 1][i * out_dim + j] - draws[i].eps[j];
      result.loss += r * r;
      delta[i * out_dim + j] = 2.0 * r * inv_batch;
    }
  }

  // Per-example contributions are summed in batch order.
  for (std::size_t l = n_layers; l-- > 0;) {
    const DenseLayer& layer = params.layers[l];
    DenseLayer& grad = result.grads.layers[l];
    k.gemm_tn_acc(delta.data(), batch, layer.rows, acts[l].data(), layer.cols,
                  grad.weights.data());
    for (std::size_t i = 0; i < batch; ++i) {
      for (std::size_t r = 0; r < layer.rows; ++r) grad.bias[r] += delta[i * layer.rows + r];
    }
    if (l == 0) break;
    std::vector<double> back(batch * layer.cols);
    k.gemm_nn(delta.data(), batch, layer.rows, layer.weights.data(), layer.cols, back.data());
    const auto& z_prev = pre[l - 1];
    for (std::size_t c = 0; c < back.size(); ++c) back[c] *= silu_grad(z_prev[c]);
    delta = std::move(back);
  }
  result.loss *= inv_batch;
  return result;
}

LossAndGrad loss_and_grad(const MlpParams& params, std::span<const Grid> x0_batch,
                          const DiffusionSchedule& schedule, Rng& rng) {
  if (x0_batch.empty()) throw ValidationError("training batch is empty");
  const auto draws =
      draw_training_noise(x0_batch.size(), params.output_dim(), schedule.steps(), rng);
  return loss_and_grad(params, x0_batch, draws, schedule);
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ValidationError("train.learning_rate must be finite and >= 0");
  }
  if (batch_size == 0) throw ValidationError("train.batch_size must be positive");
  if (iterations == 0) throw ValidationError("train.iterations must be positive");
  if (embed_dim < 2 || embed_dim % 2 != 0) {
    throw ValidationError("train.embed_dim must be even and >= 2");
  }
  if (std::find(hidden.begin(), hidden.end(), 0u) != hidden.end()) {
    throw ValidationError("train.hidden widths must be positive");
  }
}

AdamOptimizer::AdamOptimizer(const MlpParams& shape_like, double learning_rate)
    : lr_(learning_rate), m_(shape_like.zeros_like()), v_(shape_like.zeros_like()) {}

void AdamOptimizer::step(MlpParams& params, const MlpParams& grads) {
  constexpr double kBeta1 = 0.9;
  constexpr double kBeta2 = 0.999;
  constexpr double kEps = 1e-8;
  ++steps_;
  const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(steps_));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto update = [&](std::vector<double>& p, const std::vector<double>& g, std::vector<double>& m,
                      std::vector<double>& v) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        m[i] = kBeta1 * m[i] + (1.0 - kBeta1) * g[i];
        v[i] = kBeta2 * v[i] + (1.0 - kBeta2) * g[i] * g[i];
        p[i] -= lr_ * (m[i] / c1) / (std::sqrt(v[i] / c2) + kEps);
      }
    };
    update(params.layers[l].weights, grads.layers[l].weights, m_.layers[l].weights,
           v_.layers[l].weights);
    update(params.layers[l].bias, grads.layers[l].bias, m_.layers[l].bias, v_.layers[l].bias);
  }
}

TrainResult train(std::span<const Grid> data, const TrainConfig& config,
                  const DiffusionSchedule& schedule, const TrainLogger& log) {
  config.validate();
  if (data.empty()) throw ValidationError("training dataset is empty");
  const std::size_t dim = data.front().size();
  for (const auto& g : data) {
    if (g.size() != dim) throw ShapeError("training examples differ in size");
  }

  TrainResult result{init_mlp(dim, config.embed_dim, config.hidden, config.seed), {}};
  result.losses.reserve(config.iterations);
  AdamOptimizer adam(result.params, config.learning_rate);
  Rng rng(config.seed, 0x7A11);
  std::vector<Grid> batch(config.batch_size);

  for (std::size_t it = 0; it < config.iterations; ++it) {
    for (auto& slot : batch) {
      slot = data[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(data.size()) - 1))];
    }
    auto lg = loss_and_grad(result.params, batch, schedule, rng);
    if (!std::isfinite(lg.loss)) {
      throw NumericError("non-finite training loss at iteration " + std::to_string(it + 1));
    }
    adam.step(result.params, lg.grads);
    result.losses.push_back(lg.loss);
    if (log && config.log_every > 0 && ((it + 1) % config.log_every == 0 || it == 0)) {
      log(it + 1, lg.loss);
    }
  }
  return result;
}

namespace {
constexpr std::string_view kCheckpointMagic = "RPDM";
}

std::string encode_checkpoint(const MlpParams& params) {
  detail::ByteWriter w;
  w.raw(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.u32(static_cast<std::uint32_t>(params.layers.size()));
  for (const auto& layer : params.layers) {
    w.u32(static_cast<std::uint32_t>(layer.rows));
    w.u32(static_cast<std::uint32_t>(layer.cols));
    for (double v : layer.weights) w.f64(v);
    for (double v : layer.bias) w.f64(v);
  }
  return w.take();
}

MlpParams decode_checkpoint(std::string_view bytes) {
  detail::ByteReader r(bytes, "checkpoint");
  if (bytes.size() < 4 || r.raw(4) != kCheckpointMagic) {
    throw FormatError("checkpoint: bad magic");
  }
  const std::uint32_t version = r.u32();
  if (version != kCheckpointVersion) {
    throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  }
  const std::uint32_t n_layers = r.u32();
  MlpParams params;
  for (std::uint32_t l = 0; l < n_layers; ++l) {
    DenseLayer layer;
    layer.rows = r.u32();
    layer.cols = r.u32();
    const std::uint64_t count = static_cast<std::uint64_t>(layer.rows) * layer.cols;
    if ((count + layer.rows) * 8 > r.remaining()) throw FormatError("checkpoint: truncated payload");
    layer.weights.resize(static_cast<std::size_t>(count));
    for (double& v : layer.weights) v = r.f64();
    layer.bias.resize(layer.rows);
    for (double& v : layer.bias) v = r.f64();
    params.layers.push_back(std::move(layer));
  }
  if (r.remaining() != 0) throw FormatError("checkpoint: trailing bytes");
  try {
    params.validate();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("checkpoint: ") + e.what());
  }
  return params;
}

void write_checkpoint(const MlpParams& params, const std::string& path) {
  detail::write_file_bytes(path, encode_checkpoint(params));
}

MlpParams read_checkpoint(const std::string& path) {
  return decode_checkpoint(detail::read_file_bytes(path));
}

}  // namespace fovdiff
