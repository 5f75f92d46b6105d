// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fovdiff/error.hpp"
#include "fovdiff/mlp.hpp"
#include "fovdiff/schedule.hpp"
#include "oracles.hpp"

namespace fovdiff {
namespace {

// Relative error denominators are floored so that parameters whose gradient
// is numerically zero do not turn rounding noise into a large ratio.
constexpr double kGradFloor = 1e-6;

std::vector<Grid> random_batch(std::size_t n, std::size_t dim, Rng& rng) {
  std::vector<Grid> out;
  for (std::size_t i = 0; i < n; ++i) {
    Grid g(dim);
    rng.fill_normal(g.values());
    out.push_back(std::move(g));
  }
  return out;
}

// Two-component 2-D mixture points.
std::vector<Grid> two_cluster_data(std::size_t n, Rng& rng) {
  std::vector<Grid> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
    out.push_back(Grid::vector({sign * 1.5 + 0.2 * rng.normal(), sign * -1.0 + 0.2 * rng.normal()}));
  }
  return out;
}

double max_gradient_error(MlpParams& params, const std::vector<Grid>& batch,
                          const std::vector<TrainingDraw>& draws, const DiffusionSchedule& s) {
  const LossAndGrad analytic = loss_and_grad(params, batch, draws, s);
  auto loss = [&] { return loss_only(params, batch, draws, s); };
  double worst = 0.0;
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto check = [&](std::vector<double>& p, const std::vector<double>& g) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        const double fd = oracle::central_difference(loss, &p[i], 1e-4);
        const double denom = std::max({std::abs(fd), std::abs(g[i]), kGradFloor});
        worst = std::max(worst, std::abs(fd - g[i]) / denom);
      }
    };
    check(params.layers[l].weights, analytic.grads.layers[l].weights);
    check(params.layers[l].bias, analytic.grads.layers[l].bias);
  }
  return worst;
}

TEST(TimeEmbedding, ZeroLevel) {
  EXPECT_EQ(time_embedding(0, 1000, 2), (std::vector<double>{0.0, 1.0}));
}

TEST(TimeEmbedding, BoundedValues) {
  for (int t : {0, 1, 17, 999, 1000}) {
    for (double v : time_embedding(t, 1000, 4)) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
}

TEST(TimeEmbedding, RejectsOddDimension) {
  EXPECT_THROW(time_embedding(3, 10, 3), ValidationError);
  EXPECT_THROW(time_embedding(11, 10, 4), ValidationError);
}

TEST(TimeEmbedding, InjectiveOverAllLevels) {
  for (std::size_t dim : {4u, 16u}) {
    std::vector<std::vector<double>> all;
    for (int t = 0; t <= 1000; ++t) all.push_back(time_embedding(t, 1000, dim));
    std::sort(all.begin(), all.end());
    for (std::size_t i = 1; i < all.size(); ++i) {
      EXPECT_NE(all[i], all[i - 1]) << "dim " << dim;
    }
  }
}

TEST(MlpEps, ZeroParametersGiveZeroOutput) {
  const std::vector<std::size_t> hidden{8, 8};
  MlpParams p = init_mlp(5, 4, hidden, 1).zeros_like();
  const Grid out = mlp_eps(p, Grid::vector({1, 2, 3, 4, 5}), 10, 100);
  for (double v : out.values()) EXPECT_EQ(v, 0.0);
}

TEST(MlpEps, DeterministicAndFinite) {
  Rng rng(9);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto dim = static_cast<std::size_t>(rng.uniform_int(1, 6));
    const std::vector<std::size_t> hidden{static_cast<std::size_t>(rng.uniform_int(1, 12))};
    const MlpParams p = init_mlp(dim, 4, hidden, rng.engine()());
    Grid x(dim);
    for (auto& v : x.values()) v = rng.uniform(-10.0, 10.0);
    const int t = rng.uniform_int(0, 1000);
    const Grid a = mlp_eps(p, x, t, 1000);
    ASSERT_EQ(a, mlp_eps(p, x, t, 1000));
    for (double v : a.values()) ASSERT_TRUE(std::isfinite(v));
  }
}

TEST(MlpEps, ShapeMismatch) {
  const std::vector<std::size_t> hidden{4};
  const MlpParams p = init_mlp(3, 2, hidden, 1);
  EXPECT_THROW(mlp_eps(p, Grid::vector({1.0, 2.0}), 1, 10), ShapeError);
}

TEST(InitMlp, GlorotBoundsAndZeroBias) {
  const std::vector<std::size_t> hidden{32, 16};
  const MlpParams p = init_mlp(10, 6, hidden, 42);
  ASSERT_EQ(p.layers.size(), 3u);
  EXPECT_EQ(p.input_dim(), 16u);
  EXPECT_EQ(p.output_dim(), 10u);
  for (const auto& layer : p.layers) {
    const double limit = std::sqrt(6.0 / static_cast<double>(layer.rows + layer.cols));
    for (double w : layer.weights) EXPECT_LE(std::abs(w), limit);
    for (double b : layer.bias) EXPECT_EQ(b, 0.0);
  }
}

TEST(LossAndGrad, MatchesFiniteDifferencesOn2x4x2) {
  const auto s = linear_beta_schedule(100);
  Rng rng(123);
  const std::vector<std::size_t> hidden{4};
  // 2-4-2 in data space; the time embedding adds two inputs.
  MlpParams p = init_mlp(2, 2, hidden, 5);
  const auto batch = random_batch(3, 2, rng);
  const auto draws = draw_training_noise(batch.size(), 2, s.steps(), rng);
  EXPECT_LT(max_gradient_error(p, batch, draws, s), 1e-4);
}

TEST(LossAndGrad, MatchesFiniteDifferencesOnRandomNetworks) {
  const auto s = linear_beta_schedule(100);
  Rng rng(321);
  for (int net = 0; net < 20; ++net) {
    const auto dim = static_cast<std::size_t>(rng.uniform_int(1, 4));
    std::vector<std::size_t> hidden(static_cast<std::size_t>(rng.uniform_int(1, 2)));
    for (auto& h : hidden) h = static_cast<std::size_t>(rng.uniform_int(2, 6));
    MlpParams p = init_mlp(dim, 4, hidden, rng.engine()());
    for (auto& layer : p.layers) {
      for (auto& b : layer.bias) b = rng.uniform(-0.5, 0.5);
    }
    const auto batch = random_batch(static_cast<std::size_t>(rng.uniform_int(1, 5)), dim, rng);
    const auto draws = draw_training_noise(batch.size(), dim, s.steps(), rng);
    EXPECT_LT(max_gradient_error(p, batch, draws, s), 1e-4) << "network " << net;
  }
}

TEST(LossAndGrad, ZeroOutputLayerLossIsDataDimension) {
  const auto s = linear_beta_schedule(1000);
  constexpr std::size_t kDim = 6;
  const std::vector<std::size_t> hidden{8};
  MlpParams p = init_mlp(kDim, 4, hidden, 3);
  auto& out = p.layers.back();
  std::fill(out.weights.begin(), out.weights.end(), 0.0);
  std::fill(out.bias.begin(), out.bias.end(), 0.0);
  Rng rng(77);
  const auto batch = random_batch(10000, kDim, rng);
  const double loss = loss_and_grad(p, batch, s, rng).loss;
  // ||eps||^2 is chi-squared with kDim degrees of freedom, variance 2 kDim.
  const double se = std::sqrt(2.0 * kDim / 10000.0);
  EXPECT_NEAR(loss, static_cast<double>(kDim), 4.0 * se);
}

TEST(LossAndGrad, DuplicationAndPermutationInvariance) {
  const auto s = linear_beta_schedule(100);
  Rng rng(8);
  const std::vector<std::size_t> hidden{5};
  const MlpParams p = init_mlp(3, 4, hidden, 2);
  const auto batch = random_batch(4, 3, rng);
  const auto draws = draw_training_noise(4, 3, s.steps(), rng);
  const double base = loss_only(p, batch, draws, s);

  auto doubled = batch;
  doubled.insert(doubled.end(), batch.begin(), batch.end());
  auto doubled_draws = draws;
  doubled_draws.insert(doubled_draws.end(), draws.begin(), draws.end());
  EXPECT_NEAR(loss_only(p, doubled, doubled_draws, s), base, 1e-12);

  std::vector<std::size_t> order{2, 0, 3, 1};
  std::vector<Grid> perm;
  std::vector<TrainingDraw> perm_draws;
  for (auto i : order) {
    perm.push_back(batch[i]);
    perm_draws.push_back(draws[i]);
  }
  EXPECT_NEAR(loss_only(p, perm, perm_draws, s), base, 1e-12);
  EXPECT_NEAR(loss_and_grad(p, perm, perm_draws, s).loss, base, 1e-12);
}

TEST(LossAndGrad, EmptyBatch) {
  const auto s = linear_beta_schedule(10);
  const std::vector<std::size_t> hidden{2};
  const MlpParams p = init_mlp(1, 2, hidden, 1);
  Rng rng(1);
  EXPECT_THROW(loss_and_grad(p, std::vector<Grid>{}, s, rng), ValidationError);
}

TEST(Train, ReducesLossOnTwoClusterData) {
  const auto s = linear_beta_schedule(1000);
  Rng rng(4);
  const auto data = two_cluster_data(2000, rng);
  TrainConfig cfg;
  cfg.iterations = 5000;
  cfg.batch_size = 64;
  cfg.seed = 11;
  const TrainResult r = train(data, cfg, s);
  const auto [first, last] = [&] {
    double a = 0.0;
    double b = 0.0;
    for (std::size_t i = 0; i < 100; ++i) {
      a += r.losses[i];
      b += r.losses[r.losses.size() - 1 - i];
    }
    return std::pair{a / 100.0, b / 100.0};
  }();
  EXPECT_LT(last, 0.5 * first) << "initial " << first << " final " << last;
}

TEST(Train, SingleIterationIsReproducible) {
  const auto s = linear_beta_schedule(100);
  Rng rng(6);
  const auto data = two_cluster_data(50, rng);
  TrainConfig cfg;
  cfg.iterations = 1;
  cfg.batch_size = 8;
  cfg.hidden = {6};
  cfg.embed_dim = 4;
  cfg.seed = 99;
  const TrainResult a = train(data, cfg, s);
  const TrainResult b = train(data, cfg, s);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.losses, b.losses);
  const MlpParams init = init_mlp(2, 4, cfg.hidden, cfg.seed);
  EXPECT_FALSE(a.params == init);
  // One Adam step moves each parameter by at most about the learning rate.
  for (std::size_t l = 0; l < init.layers.size(); ++l) {
    for (std::size_t i = 0; i < init.layers[l].weights.size(); ++i) {
      EXPECT_LE(std::abs(a.params.layers[l].weights[i] - init.layers[l].weights[i]),
                cfg.learning_rate * (1.0 + 1e-6));
    }
  }
}

TEST(Train, ZeroLearningRateLeavesParamsUnchanged) {
  const auto s = linear_beta_schedule(100);
  Rng rng(6);
  const auto data = two_cluster_data(50, rng);
  TrainConfig cfg;
  cfg.iterations = 20;
  cfg.batch_size = 8;
  cfg.hidden = {6};
  cfg.embed_dim = 4;
  cfg.learning_rate = 0.0;
  cfg.seed = 3;
  EXPECT_EQ(train(data, cfg, s).params, init_mlp(2, 4, cfg.hidden, cfg.seed));
}

TEST(Train, SameSeedSameParams) {
  const auto s = linear_beta_schedule(100);
  Rng rng(6);
  const auto data = two_cluster_data(200, rng);
  TrainConfig cfg;
  cfg.iterations = 50;
  cfg.batch_size = 16;
  cfg.hidden = {16, 16};
  cfg.embed_dim = 4;
  cfg.seed = 1234;
  EXPECT_EQ(train(data, cfg, s).params, train(data, cfg, s).params);
  TrainConfig other = cfg;
  other.seed = 1235;
  EXPECT_FALSE(train(data, cfg, s).params == train(data, other, s).params);
}

TEST(Train, RejectsEmptyDataAndBadConfig) {
  const auto s = linear_beta_schedule(10);
  TrainConfig cfg;
  EXPECT_THROW(train(std::vector<Grid>{}, cfg, s), ValidationError);
  cfg.batch_size = 0;
  EXPECT_THROW(train(std::vector<Grid>{Grid::vector({0.0})}, cfg, s), ValidationError);
}

TEST(Train, NonFiniteLossAborts) {
  const auto s = linear_beta_schedule(10);
  TrainConfig cfg;
  cfg.iterations = 3;
  cfg.batch_size = 2;
  cfg.hidden = {2};
  cfg.embed_dim = 2;
  const std::vector<Grid> data{Grid::vector({std::nan("")})};
  EXPECT_THROW(train(data, cfg, s), NumericError);
}

TEST(Checkpoint, LayoutAndRoundTrip) {
  const std::vector<std::size_t> hidden{3};
  const MlpParams p = init_mlp(2, 2, hidden, 7);
  const std::string bytes = encode_checkpoint(p);
  // magic + version + count, then per layer 8 bytes of dims plus payload.
  const std::size_t expect = 12 + (8 + 8 * (3 * 4 + 3)) + (8 + 8 * (2 * 3 + 2));
  ASSERT_EQ(bytes.size(), expect);
  EXPECT_EQ(bytes.substr(0, 4), "RPDM");
  EXPECT_EQ(decode_checkpoint(bytes), p);
}

TEST(Checkpoint, RejectsCorruption) {
  const std::vector<std::size_t> hidden{3};
  const std::string bytes = encode_checkpoint(init_mlp(2, 2, hidden, 7));
  std::string bad = bytes;
  bad[0] = 'X';
  EXPECT_THROW(decode_checkpoint(bad), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes.substr(0, bytes.size() - 1)), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), FormatError);
  std::string version = bytes;
  version[4] = 2;
  EXPECT_THROW(decode_checkpoint(version), FormatError);
}

}  // namespace
}  // namespace fovdiff
