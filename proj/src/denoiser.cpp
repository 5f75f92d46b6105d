// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/denoiser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fovdiff/error.hpp"
#include "fovdiff/simd/kernels.hpp"

namespace fovdiff {

namespace {

void require_noise_level(int t, const DiffusionSchedule& schedule) {
  if (t < 1 || t > schedule.steps()) {
    throw ValidationError("denoiser evaluated at t=" + std::to_string(t) + ", needs 1 <= t <= T");
  }
}

// eps = (x_t - sqrt(abar) x0) / sqrt(1 - abar)
Grid eps_from_x0(const Grid& x_t, const Grid& x0, double alpha_bar) {
  const double noise = std::sqrt(1.0 - alpha_bar);
  Grid eps(x_t.shape());
  simd::kernels().axpby(1.0 / noise, x_t.data(), -std::sqrt(alpha_bar) / noise, x0.data(),
                        eps.data(), x_t.size());
  return eps;
}

void require_eps_level(double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar < 1.0)) {
    throw ValidationError("eps prediction needs alpha_bar in (0, 1)");
  }
}

}  // namespace

X0Prediction predict_x0(const Denoiser& denoiser, const Grid& x_t, int t,
                        const DiffusionSchedule& schedule) {
  require_noise_level(t, schedule);
  X0Prediction out{Grid(x_t.shape()), denoiser.predict_eps(x_t, t, schedule)};
  require_same_shape(x_t, out.eps, "denoiser output");
  const double ab = schedule.alpha_bar(t);
  const double inv_sqrt_ab = 1.0 / std::sqrt(ab);
  simd::kernels().axpby(inv_sqrt_ab, x_t.data(), -std::sqrt(1.0 - ab) * inv_sqrt_ab,
                        out.eps.data(), out.x0.data(), x_t.size());
  return out;
}

void GaussianMixture::validate() const {
  if (weights.empty()) throw ValidationError("mixture has no components");
  if (means.size() != weights.size() || variances.size() != weights.size()) {
    throw ValidationError("mixture weights/means/variances disagree on component count");
  }
  const std::size_t d = dim();
  if (d == 0) throw ValidationError("mixture dimension is zero");
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0)) throw ValidationError("mixture weights must be positive");
    total += weights[k];
    if (means[k].size() != d || variances[k].size() != d) {
      throw ValidationError("mixture component " + std::to_string(k) + " has wrong dimension");
    }
    for (double v : variances[k]) {
      if (!(v > 0.0)) throw ValidationError("mixture variances must be positive");
    }
  }
  if (std::abs(total - 1.0) > 1e-12) throw ValidationError("mixture weights must sum to 1");
}

GaussianMixture GaussianMixture::isotropic(std::size_t dim, double mean, double variance) {
  GaussianMixture g;
  g.weights = {1.0};
  g.means = {std::vector<double>(dim, mean)};
  g.variances = {std::vector<double>(dim, variance)};
  return g;
}

Grid gmm_posterior_x0_mean(const GaussianMixture& prior, const Grid& x_t, double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw ValidationError("posterior mean needs alpha_bar in (0, 1]");
  }
  const std::size_t d = prior.dim();
  if (x_t.size() != d) {
    throw ShapeError("x_t has " + std::to_string(x_t.size()) + " values, prior dimension is " +
                     std::to_string(d));
  }
  // No noise: the observation is the clean sample.
  if (alpha_bar == 1.0) return x_t;

  const auto& k = simd::kernels();
  const double sa = std::sqrt(alpha_bar);
  const double noise_var = 1.0 - alpha_bar;
  const std::size_t n_comp = prior.components();

  std::vector<double> log_resp(n_comp);
  std::vector<double> inv_var(d);
  std::vector<std::vector<double>> gains(n_comp, std::vector<double>(d));
  for (std::size_t c = 0; c < n_comp; ++c) {
    double log_det = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double s2 = prior.variances[c][i];
      const double marginal = alpha_bar * s2 + noise_var;
      inv_var[i] = 1.0 / marginal;
      log_det += std::log(marginal);
      gains[c][i] = sa * s2 / marginal;
    }
    const double quad = k.scaled_sq_dist(x_t.data(), prior.means[c].data(), sa, inv_var.data(), d);
    log_resp[c] = std::log(prior.weights[c]) - 0.5 * (quad + log_det);
  }

  // log-sum-exp normalisation
  const double top = *std::max_element(log_resp.begin(), log_resp.end());
  double norm = 0.0;
  for (double& lr : log_resp) {
    lr = std::exp(lr - top);
    norm += lr;
  }

  Grid out(x_t.shape());
  for (std::size_t c = 0; c < n_comp; ++c) {
    const double r = log_resp[c] / norm;
    if (r == 0.0) continue;
    const auto& mu = prior.means[c];
    const auto& g = gains[c];
    for (std::size_t i = 0; i < d; ++i) out[i] += r * (mu[i] + g[i] * (x_t[i] - sa * mu[i]));
  }
  return out;
}

Grid gmm_eps(const GaussianMixture& prior, const Grid& x_t, double alpha_bar) {
  require_eps_level(alpha_bar);
  return eps_from_x0(x_t, gmm_posterior_x0_mean(prior, x_t, alpha_bar), alpha_bar);
}

GmmDenoiser::GmmDenoiser(GaussianMixture prior) : prior_(std::move(prior)) { prior_.validate(); }

Grid GmmDenoiser::predict_eps(const Grid& x_t, int t, const DiffusionSchedule& schedule) const {
  require_noise_level(t, schedule);
  return gmm_eps(prior_, x_t, schedule.alpha_bar(t));
}

Gaussian2 Gaussian2::correlated(double rho) {
  Gaussian2 g;
  g.cov = {1.0, rho, rho, 1.0};
  g.validate();
  return g;
}

void Gaussian2::validate() const {
  if (cov[1] != cov[2]) throw ValidationError("2-D covariance must be symmetric");
  const double det = cov[0] * cov[3] - cov[1] * cov[2];
  if (!(cov[0] > 0.0 && det > 0.0)) {
    throw ValidationError("2-D covariance must be positive definite");
  }
}

Grid gaussian2_posterior_x0_mean(const Gaussian2& prior, const Grid& x_t, double alpha_bar) {
  if (!(alpha_bar > 0.0 && alpha_bar <= 1.0)) {
    throw ValidationError("posterior mean needs alpha_bar in (0, 1]");
  }
  if (x_t.size() != 2) throw ShapeError("2-D Gaussian prior needs a 2-value grid");
  if (alpha_bar == 1.0) return x_t;
  const double sa = std::sqrt(alpha_bar);
  const double nv = 1.0 - alpha_bar;
  // M = abar * Sigma + (1 - abar) I, mean = mu + sqrt(abar) Sigma M^-1 (x_t - sqrt(abar) mu)
  const double m00 = alpha_bar * prior.cov[0] + nv;
  const double m01 = alpha_bar * prior.cov[1];
  const double m11 = alpha_bar * prior.cov[3] + nv;
  const double det = m00 * m11 - m01 * m01;
  const double r0 = x_t[0] - sa * prior.mean[0];
  const double r1 = x_t[1] - sa * prior.mean[1];
  const double s0 = (m11 * r0 - m01 * r1) / det;
  const double s1 = (m00 * r1 - m01 * r0) / det;
  Grid out(x_t.shape());
  out[0] = prior.mean[0] + sa * (prior.cov[0] * s0 + prior.cov[1] * s1);
  out[1] = prior.mean[1] + sa * (prior.cov[2] * s0 + prior.cov[3] * s1);
  return out;
}

Gaussian2Denoiser::Gaussian2Denoiser(Gaussian2 prior) : prior_(prior) { prior_.validate(); }

Grid Gaussian2Denoiser::predict_eps(const Grid& x_t, int t,
                                    const DiffusionSchedule& schedule) const {
  require_noise_level(t, schedule);
  const double ab = schedule.alpha_bar(t);
  require_eps_level(ab);
  return eps_from_x0(x_t, gaussian2_posterior_x0_mean(prior_, x_t, ab), ab);
}

}  // namespace fovdiff
