// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <vector>

#include "fovdiff/grid.hpp"
#include "fovdiff/schedule.hpp"

namespace fovdiff {

/// Noise-prediction model eps(x_t; t). Implementations must be pure and
/// safe to evaluate from several threads at once.
class Denoiser {
 public:
  virtual ~Denoiser() = default;
  // t in [1, T]; t == 0 is an error since there is no noise to predict.
  virtual Grid predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const = 0;
};

struct X0Prediction {
  Grid x0;
  Grid eps;  // the denoiser output used to form x0
};

// x0 = (x_t - sqrt(1 - abar_t) * eps) / sqrt(abar_t)
X0Prediction predict_x0(const Denoiser& denoiser, const Grid& x_t, int t,
                        const DiffusionSchedule& schedule);

/// Mixture of axis-aligned Gaussians over R^d.
struct GaussianMixture {
  std::vector<double> weights;
  std::vector<std::vector<double>> means;
  std::vector<std::vector<double>> variances;

  std::size_t components() const { return weights.size(); }
  std::size_t dim() const { return means.empty() ? 0 : means.front().size(); }

  // Throws ValidationError on ragged shapes, non-positive variances or
  // weights that do not sum to 1 within 1e-12.
  void validate() const;

  // Isotropic single-component prior, replicated over `dim` coordinates.
  static GaussianMixture isotropic(std::size_t dim, double mean, double variance);
};

// E[x0 | x_t] for x_t = sqrt(abar) x0 + sqrt(1 - abar) eps, x0 ~ prior.
Grid gmm_posterior_x0_mean(const GaussianMixture& prior, const Grid& x_t, double alpha_bar);

// Noise implied by the posterior mean; requires abar in (0, 1).
Grid gmm_eps(const GaussianMixture& prior, const Grid& x_t, double alpha_bar);

class GmmDenoiser : public Denoiser {
 public:
  explicit GmmDenoiser(GaussianMixture prior);
  Grid predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const override;
  const GaussianMixture& prior() const { return prior_; }

 private:
  GaussianMixture prior_;
};

/// Single 2-D Gaussian with full covariance. Exercises cross-coordinate
/// dependence, which the diagonal mixture cannot.
struct Gaussian2 {
  std::array<double, 2> mean{0.0, 0.0};
  std::array<double, 4> cov{1.0, 0.0, 0.0, 1.0};  // row-major, symmetric positive definite

  static Gaussian2 correlated(double rho);
  void validate() const;
};

Grid gaussian2_posterior_x0_mean(const Gaussian2& prior, const Grid& x_t, double alpha_bar);

class Gaussian2Denoiser : public Denoiser {
 public:
  explicit Gaussian2Denoiser(Gaussian2 prior);
  Grid predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const override;

 private:
  Gaussian2 prior_;
};

}  // namespace fovdiff
