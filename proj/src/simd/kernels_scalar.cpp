// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fovdiff/simd/kernels.hpp"

namespace fovdiff::simd {

namespace {

void axpby_scalar(double a, const double* x, double b, const double* y, double* out,
                  std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void select_scalar(const double* mask, const double* known, const double* x, double* out,
                   std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = mask[i] != 0.0 ? known[i] : x[i];
}

double dot_scalar(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double scaled_sq_dist_scalar(const double* x, const double* center, double scale,
                             const double* weight, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = x[i] - scale * center[i];
    acc += d * d * weight[i];
  }
  return acc;
}

void gemv_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_scalar(w + r * cols, x, cols);
}

void gemm_nt_scalar(const double* a, std::size_t batch, std::size_t k, const double* w,
                    std::size_t n, const double* bias, double* z) {
  for (std::size_t b = 0; b < batch; ++b) gemv_scalar(w, n, k, a + b * k, bias, z + b * n);
}

void gemm_tn_acc_scalar(const double* d, std::size_t batch, std::size_t n, const double* a,
                        std::size_t k, double* dw) {
  for (std::size_t j = 0; j < n; ++j) {
    double* row = dw + j * k;
    for (std::size_t b = 0; b < batch; ++b) {
      const double coef = d[b * n + j];
      const double* src = a + b * k;
      for (std::size_t c = 0; c < k; ++c) row[c] += coef * src[c];
    }
  }
}

void gemm_nn_scalar(const double* d, std::size_t batch, std::size_t n, const double* w,
                    std::size_t k, double* g) {
  for (std::size_t b = 0; b < batch; ++b) {
    double* out = g + b * k;
    for (std::size_t c = 0; c < k; ++c) out[c] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double coef = d[b * n + j];
      const double* row = w + j * k;
      for (std::size_t c = 0; c < k; ++c) out[c] += coef * row[c];
    }
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{
      SimdLevel::kScalar, axpby_scalar,      select_scalar,     dot_scalar, scaled_sq_dist_scalar,
      gemv_scalar,        gemm_nt_scalar,    gemm_tn_acc_scalar, gemm_nn_scalar,
  };
  return table;
}

}  // namespace fovdiff::simd
