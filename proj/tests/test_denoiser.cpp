// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "fovdiff/denoiser.hpp"
#include "fovdiff/error.hpp"
#include "fovdiff/rng.hpp"
#include "fovdiff/schedule.hpp"
#include "oracles.hpp"

namespace fovdiff {
namespace {

// Returns a fixed eps regardless of input.
class FixedEps : public Denoiser {
 public:
  explicit FixedEps(Grid eps) : eps_(std::move(eps)) {}
  Grid predict_eps(const Grid&, int, const DiffusionSchedule&) const override { return eps_; }

 private:
  Grid eps_;
};

GaussianMixture two_modes(double spread) {
  return GaussianMixture{{0.5, 0.5}, {{-spread}, {spread}}, {{1.0}, {1.0}}};
}

// Index of the level whose alpha bar is closest to `target`.
int level_near(const DiffusionSchedule& s, double target) {
  int best = 1;
  for (int t = 1; t <= s.steps(); ++t) {
    if (std::abs(s.alpha_bar(t) - target) < std::abs(s.alpha_bar(best) - target)) best = t;
  }
  return best;
}

TEST(PredictX0, InvertsForwardDiffusion) {
  const auto s = linear_beta_schedule(1000);
  Rng rng(3);
  Grid x0(std::size_t{8});
  Grid eps(std::size_t{8});
  rng.fill_normal(x0.values());
  rng.fill_normal(eps.values());
  for (int t : {1, 20, 500, 1000}) {
    const Grid x_t = forward_diffuse(x0, t, eps, s);
    const auto pred = predict_x0(FixedEps(eps), x_t, t, s);
    EXPECT_LT(max_abs_diff(pred.x0, x0), 1e-6) << "t=" << t;
    EXPECT_EQ(pred.eps, eps);
  }
}

TEST(PredictX0, ZeroDenoiserDividesBySqrtAlphaBar) {
  const auto s = linear_beta_schedule(2, 0.5, 0.5);
  const auto pred = predict_x0(FixedEps(Grid::vector({0.0})), Grid::vector({0.5}), 2, s);
  EXPECT_DOUBLE_EQ(pred.x0[0], 1.0);
}

TEST(PredictX0, RejectsLevelZero) {
  const auto s = linear_beta_schedule(10);
  EXPECT_THROW(predict_x0(FixedEps(Grid::vector({0.0})), Grid::vector({0.5}), 0, s),
               ValidationError);
}

TEST(PredictX0, StandardNormalPriorAtHalfAlphaBar) {
  // A one-step schedule with beta 0.5 puts alpha_bar(1) at exactly 0.5.
  const auto s = linear_beta_schedule(1, 0.5, 0.5);
  const GmmDenoiser den(GaussianMixture::isotropic(1, 0.0, 1.0));
  const auto pred = predict_x0(den, Grid::vector({1.0}), 1, s);
  EXPECT_NEAR(pred.x0[0], 0.70711, 1e-4);
}

TEST(GmmPosterior, ConjugateSingleGaussian) {
  const auto prior = GaussianMixture::isotropic(1, 0.0, 1.0);
  const Grid m = gmm_posterior_x0_mean(prior, Grid::vector({1.0}), 0.5);
  EXPECT_NEAR(m[0], 0.7071067811865475, 1e-6);
  const double quad = oracle::quadrature_posterior_mean({{1.0, 0.0, 1.0}}, 1.0, 0.5);
  EXPECT_NEAR(quad, 0.7071067811865475, 1e-6);
}

TEST(GmmPosterior, SymmetricModesAtOrigin) {
  EXPECT_EQ(gmm_posterior_x0_mean(two_modes(3.0), Grid::vector({0.0}), 0.3)[0], 0.0);
  EXPECT_EQ(gmm_eps(two_modes(3.0), Grid::vector({0.0}), 0.3)[0], 0.0);
}

TEST(GmmPosterior, NoiseFreeReturnsObservation) {
  const Grid x = Grid::vector({1.7, -0.2});
  const auto prior = GaussianMixture{{0.3, 0.7}, {{1.0, 2.0}, {-1.0, 0.5}}, {{0.5, 2.0}, {1.0, 1.0}}};
  EXPECT_EQ(gmm_posterior_x0_mean(prior, x, 1.0), x);
}

TEST(GmmPosterior, RejectsAlphaBarOutOfRange) {
  const auto prior = GaussianMixture::isotropic(1, 0.0, 1.0);
  EXPECT_THROW(gmm_posterior_x0_mean(prior, Grid::vector({0.0}), 0.0), ValidationError);
  EXPECT_THROW(gmm_posterior_x0_mean(prior, Grid::vector({0.0}), 1.5), ValidationError);
  EXPECT_THROW(gmm_eps(prior, Grid::vector({0.0}), 1.0), ValidationError);
}

TEST(GmmEps, StandardNormalPrior) {
  const Grid e = gmm_eps(GaussianMixture::isotropic(1, 0.0, 1.0), Grid::vector({1.0}), 0.5);
  EXPECT_NEAR(e[0], 0.70711, 1e-4);
}

TEST(GmmEps, PointMassAttributesEverythingToNoise) {
  const auto prior = GaussianMixture::isotropic(1, 0.0, 1e-10);
  for (double x : {-2.0, 0.3, 4.0}) {
    const double ab = 0.6;
    EXPECT_NEAR(gmm_eps(prior, Grid::vector({x}), ab)[0], x / std::sqrt(1.0 - ab), 1e-6);
  }
}

TEST(GmmPosterior, ConsistencyIdentity) {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, 3));
    GaussianMixture prior;
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      prior.weights.push_back(rng.uniform(0.1, 1.0));
      total += prior.weights.back();
      prior.means.push_back({rng.uniform(-4, 4), rng.uniform(-4, 4)});
      prior.variances.push_back({rng.uniform(0.05, 3), rng.uniform(0.05, 3)});
    }
    for (auto& w : prior.weights) w /= total;
    const Grid x = Grid::vector({rng.uniform(-6, 6), rng.uniform(-6, 6)});
    const double ab = rng.uniform(1e-4, 1.0 - 1e-4);
    const Grid m = gmm_posterior_x0_mean(prior, x, ab);
    const Grid e = gmm_eps(prior, x, ab);
    for (std::size_t i = 0; i < 2; ++i) {
      EXPECT_NEAR(std::sqrt(ab) * m[i] + std::sqrt(1.0 - ab) * e[i], x[i], 1e-10);
    }
  }
}

TEST(GmmPosterior, MatchesQuadratureOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto k = static_cast<std::size_t>(rng.uniform_int(1, 3));
    std::vector<oracle::Component1d> comps;
    GaussianMixture prior;
    double total = 0.0;
    for (std::size_t c = 0; c < k; ++c) {
      comps.push_back({rng.uniform(0.1, 1.0), rng.uniform(-4.0, 4.0), rng.uniform(0.1, 4.0)});
      total += comps.back().weight;
    }
    for (auto& c : comps) {
      c.weight /= total;
      prior.weights.push_back(c.weight);
      prior.means.push_back({c.mean});
      prior.variances.push_back({c.variance});
    }
    // Rounding the weights to sum to one exactly is left to validate().
    double sum = 0.0;
    for (double w : prior.weights) sum += w;
    prior.weights.back() += 1.0 - sum;
    comps.back().weight = prior.weights.back();

    const double ab = rng.uniform(0.01, 0.99);
    const double x = rng.uniform(-5.0, 5.0);
    const double got = gmm_posterior_x0_mean(prior, Grid::vector({x}), ab)[0];
    const double want = oracle::quadrature_posterior_mean(comps, x, ab);
    EXPECT_NEAR(got, want, 1e-6) << "trial " << trial << " abar " << ab << " x " << x;
  }
}

TEST(GmmPosterior, LogSumExpStability) {
  const auto prior = GaussianMixture{{0.2, 0.5, 0.3}, {{-50.0}, {0.0}, {80.0}}, {{0.01}, {1.0}, {4.0}}};
  for (double x : {-1000.0, -300.0, 0.0, 500.0, 1000.0}) {
    for (double ab : {1e-6, 1e-3, 0.5, 0.999999}) {
      const double m = gmm_posterior_x0_mean(prior, Grid::vector({x}), ab)[0];
      const double e = gmm_eps(prior, Grid::vector({x}), ab)[0];
      EXPECT_TRUE(std::isfinite(m)) << x << " " << ab;
      EXPECT_TRUE(std::isfinite(e)) << x << " " << ab;
    }
  }
}

TEST(GmmDenoiser, PureFunction) {
  const auto s = linear_beta_schedule(1000);
  const GmmDenoiser den(two_modes(2.0));
  const Grid x = Grid::vector({0.37});
  EXPECT_EQ(den.predict_eps(x, 321, s), den.predict_eps(x, 321, s));
  EXPECT_THROW(den.predict_eps(x, 0, s), ValidationError);
}

TEST(GaussianMixture, Validation) {
  EXPECT_THROW((GaussianMixture{{0.5, 0.4}, {{0.0}, {1.0}}, {{1.0}, {1.0}}}.validate()),
               ValidationError);
  EXPECT_THROW((GaussianMixture{{1.0}, {{0.0}}, {{0.0}}}.validate()), ValidationError);
  EXPECT_THROW((GaussianMixture{{1.0}, {{0.0, 1.0}}, {{1.0}}}.validate()), ValidationError);
  EXPECT_NO_THROW(two_modes(1.0).validate());
}

TEST(Gaussian2, DiagonalCaseMatchesMixture) {
  Gaussian2 prior;
  prior.mean = {0.5, -1.0};
  prior.cov = {2.0, 0.0, 0.0, 0.5};
  const GaussianMixture mix{{1.0}, {{0.5, -1.0}}, {{2.0, 0.5}}};
  const Grid x = Grid::vector({0.3, 1.2});
  for (double ab : {0.1, 0.5, 0.9}) {
    EXPECT_LT(max_abs_diff(gaussian2_posterior_x0_mean(prior, x, ab),
                           gmm_posterior_x0_mean(mix, x, ab)),
              1e-12);
  }
}

TEST(Gaussian2, NoiseFreeLimitConditionsExactly) {
  const auto prior = Gaussian2::correlated(0.8);
  const Grid m = gaussian2_posterior_x0_mean(prior, Grid::vector({1.0, -0.3}), 1.0);
  EXPECT_NEAR(m[0], 1.0, 1e-12);
  EXPECT_NEAR(m[1], -0.3, 1e-12);
  EXPECT_THROW(Gaussian2::correlated(1.0).validate(), ValidationError);
}

TEST(Gaussian2Denoiser, ConsistentWithSchedule) {
  const auto s = linear_beta_schedule(1000);
  const Gaussian2Denoiser den(Gaussian2::correlated(0.8));
  const int t = level_near(s, 0.5);
  const Grid x = Grid::vector({0.4, -0.9});
  const auto pred = predict_x0(den, x, t, s);
  const Grid direct = gaussian2_posterior_x0_mean(Gaussian2::correlated(0.8), x, s.alpha_bar(t));
  EXPECT_LT(max_abs_diff(pred.x0, direct), 1e-12);
}

}  // namespace
}  // namespace fovdiff
