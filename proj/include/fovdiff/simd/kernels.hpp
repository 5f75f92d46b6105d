// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>

namespace fovdiff::simd {

enum class SimdLevel { kScalar, kAvx2 };

const char* to_string(SimdLevel level);

/// Inner loops of the engine. Every entry has a scalar reference version;
/// vector versions must agree with it to rounding (see simd_equivalence tests).
struct KernelTable {
  SimdLevel level;

  // out = a*x + b*y
  void (*axpby)(double a, const double* x, double b, const double* y, double* out, std::size_t n);
  // out = mask != 0 ? known : x
  void (*select)(const double* mask, const double* known, const double* x, double* out,
                 std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  // sum_i (x_i - scale*center_i)^2 * weight_i
  double (*scaled_sq_dist)(const double* x, const double* center, double scale,
                           const double* weight, std::size_t n);
  // y = W x + bias, W row-major rows x cols
  void (*gemv)(const double* w, std::size_t rows, std::size_t cols, const double* x,
               const double* bias, double* y);
  // Batched forms, all row-major. Rows of A, D, Z, G are batch samples.
  // Z[b, n] = bias[n] + sum_k A[b, k] W[n, k]      A: B x K, W: N x K
  void (*gemm_nt)(const double* a, std::size_t batch, std::size_t k, const double* w,
                  std::size_t n, const double* bias, double* z);
  // dW[n, k] += sum_b D[b, n] A[b, k], b ascending   D: B x N, A: B x K
  void (*gemm_tn_acc)(const double* d, std::size_t batch, std::size_t n, const double* a,
                      std::size_t k, double* dw);
  // G[b, k] = sum_n D[b, n] W[n, k]                 D: B x N, W: N x K
  void (*gemm_nn)(const double* d, std::size_t batch, std::size_t n, const double* w,
                  std::size_t k, double* g);
};

const KernelTable& scalar_kernels();

// Returns nullptr when the level was not compiled in or the CPU lacks it.
const KernelTable* kernels_for(SimdLevel level);

bool cpu_supports(SimdLevel level);

/// Active table: best supported level, overridable once at startup with
/// FOVDIFF_SIMD=scalar|avx2.
const KernelTable& kernels();

}  // namespace fovdiff::simd
