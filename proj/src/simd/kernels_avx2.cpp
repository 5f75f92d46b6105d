// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#if defined(__x86_64__) && !defined(__AVX2__)
#error "kernels_avx2.cpp must be compiled with -mavx2 -mfma"
#endif

#include <immintrin.h>

#include "fovdiff/simd/kernels.hpp"

namespace fovdiff::simd {

namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

void axpby_avx2(double a, const double* x, double b, const double* y, double* out,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d by = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(out + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), by));
  }
  for (; i < n; ++i) out[i] = a * x[i] + b * y[i];
}

void select_avx2(const double* mask, const double* known, const double* x, double* out,
                 std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d keep = _mm256_cmp_pd(_mm256_loadu_pd(mask + i), zero, _CMP_NEQ_UQ);
    _mm256_storeu_pd(out + i,
                     _mm256_blendv_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(known + i), keep));
  }
  for (; i < n; ++i) out[i] = mask[i] != 0.0 ? known[i] : x[i];
}

double dot_avx2(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double scaled_sq_dist_avx2(const double* x, const double* center, double scale,
                           const double* weight, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(scale);
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i),
                                    _mm256_mul_pd(vs, _mm256_loadu_pd(center + i)));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(d, d), _mm256_loadu_pd(weight + i), acc);
  }
  double total = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - scale * center[i];
    total += d * d * weight[i];
  }
  return total;
}

void gemv_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x,
               const double* bias, double* y) {
  for (std::size_t r = 0; r < rows; ++r) y[r] = bias[r] + dot_avx2(w + r * cols, x, cols);
}

// Four samples share each weight-row load.
void gemm_nt_avx2(const double* a, std::size_t batch, std::size_t k, const double* w,
                  std::size_t n, const double* bias, double* z) {
  std::size_t b = 0;
  for (; b + 4 <= batch; b += 4) {
    const double* a0 = a + b * k;
    const double* a1 = a0 + k;
    const double* a2 = a1 + k;
    const double* a3 = a2 + k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* row = w + j * k;
      __m256d s0 = _mm256_setzero_pd();
      __m256d s1 = _mm256_setzero_pd();
      __m256d s2 = _mm256_setzero_pd();
      __m256d s3 = _mm256_setzero_pd();
      std::size_t c = 0;
      for (; c + 4 <= k; c += 4) {
        const __m256d wv = _mm256_loadu_pd(row + c);
        s0 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(a0 + c), s0);
        s1 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(a1 + c), s1);
        s2 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(a2 + c), s2);
        s3 = _mm256_fmadd_pd(wv, _mm256_loadu_pd(a3 + c), s3);
      }
      double t0 = hsum(s0), t1 = hsum(s1), t2 = hsum(s2), t3 = hsum(s3);
      for (; c < k; ++c) {
        t0 += row[c] * a0[c];
        t1 += row[c] * a1[c];
        t2 += row[c] * a2[c];
        t3 += row[c] * a3[c];
      }
      z[(b + 0) * n + j] = bias[j] + t0;
      z[(b + 1) * n + j] = bias[j] + t1;
      z[(b + 2) * n + j] = bias[j] + t2;
      z[(b + 3) * n + j] = bias[j] + t3;
    }
  }
  for (; b < batch; ++b) gemv_avx2(w, n, k, a + b * k, bias, z + b * n);
}

// Each gradient row stays in registers across four samples; the update order
// per element is b ascending.
void gemm_tn_acc_avx2(const double* d, std::size_t batch, std::size_t n, const double* a,
                      std::size_t k, double* dw) {
  for (std::size_t j = 0; j < n; ++j) {
    double* row = dw + j * k;
    std::size_t b = 0;
    for (; b + 4 <= batch; b += 4) {
      const double* a0 = a + b * k;
      const double* a1 = a0 + k;
      const double* a2 = a1 + k;
      const double* a3 = a2 + k;
      const double d0 = d[(b + 0) * n + j], d1 = d[(b + 1) * n + j];
      const double d2 = d[(b + 2) * n + j], d3 = d[(b + 3) * n + j];
      const __m256d v0 = _mm256_set1_pd(d0), v1 = _mm256_set1_pd(d1);
      const __m256d v2 = _mm256_set1_pd(d2), v3 = _mm256_set1_pd(d3);
      std::size_t c = 0;
      for (; c + 4 <= k; c += 4) {
        __m256d acc = _mm256_loadu_pd(row + c);
        acc = _mm256_fmadd_pd(v0, _mm256_loadu_pd(a0 + c), acc);
        acc = _mm256_fmadd_pd(v1, _mm256_loadu_pd(a1 + c), acc);
        acc = _mm256_fmadd_pd(v2, _mm256_loadu_pd(a2 + c), acc);
        acc = _mm256_fmadd_pd(v3, _mm256_loadu_pd(a3 + c), acc);
        _mm256_storeu_pd(row + c, acc);
      }
      for (; c < k; ++c) {
        row[c] += d0 * a0[c];
        row[c] += d1 * a1[c];
        row[c] += d2 * a2[c];
        row[c] += d3 * a3[c];
      }
    }
    for (; b < batch; ++b) {
      const double coef = d[b * n + j];
      const double* src = a + b * k;
      const __m256d vc = _mm256_set1_pd(coef);
      std::size_t c = 0;
      for (; c + 4 <= k; c += 4) {
        _mm256_storeu_pd(row + c, _mm256_fmadd_pd(vc, _mm256_loadu_pd(src + c),
                                                  _mm256_loadu_pd(row + c)));
      }
      for (; c < k; ++c) row[c] += coef * src[c];
    }
  }
}

// Output tiles of 4 samples x 8 columns accumulate over all n in registers.
void gemm_nn_avx2(const double* d, std::size_t batch, std::size_t n, const double* w,
                  std::size_t k, double* g) {
  std::size_t b = 0;
  for (; b + 4 <= batch; b += 4) {
    const double* d0 = d + b * n;
    const double* d1 = d0 + n;
    const double* d2 = d1 + n;
    const double* d3 = d2 + n;
    std::size_t c = 0;
    for (; c + 8 <= k; c += 8) {
      __m256d s00 = _mm256_setzero_pd(), s01 = _mm256_setzero_pd();
      __m256d s10 = _mm256_setzero_pd(), s11 = _mm256_setzero_pd();
      __m256d s20 = _mm256_setzero_pd(), s21 = _mm256_setzero_pd();
      __m256d s30 = _mm256_setzero_pd(), s31 = _mm256_setzero_pd();
      for (std::size_t j = 0; j < n; ++j) {
        const __m256d w0 = _mm256_loadu_pd(w + j * k + c);
        const __m256d w1 = _mm256_loadu_pd(w + j * k + c + 4);
        const __m256d v0 = _mm256_set1_pd(d0[j]);
        const __m256d v1 = _mm256_set1_pd(d1[j]);
        const __m256d v2 = _mm256_set1_pd(d2[j]);
        const __m256d v3 = _mm256_set1_pd(d3[j]);
        s00 = _mm256_fmadd_pd(v0, w0, s00);
        s01 = _mm256_fmadd_pd(v0, w1, s01);
        s10 = _mm256_fmadd_pd(v1, w0, s10);
        s11 = _mm256_fmadd_pd(v1, w1, s11);
        s20 = _mm256_fmadd_pd(v2, w0, s20);
        s21 = _mm256_fmadd_pd(v2, w1, s21);
        s30 = _mm256_fmadd_pd(v3, w0, s30);
        s31 = _mm256_fmadd_pd(v3, w1, s31);
      }
      _mm256_storeu_pd(g + (b + 0) * k + c, s00);
      _mm256_storeu_pd(g + (b + 0) * k + c + 4, s01);
      _mm256_storeu_pd(g + (b + 1) * k + c, s10);
      _mm256_storeu_pd(g + (b + 1) * k + c + 4, s11);
      _mm256_storeu_pd(g + (b + 2) * k + c, s20);
      _mm256_storeu_pd(g + (b + 2) * k + c + 4, s21);
      _mm256_storeu_pd(g + (b + 3) * k + c, s30);
      _mm256_storeu_pd(g + (b + 3) * k + c + 4, s31);
    }
    for (; c < k; ++c) {
      for (std::size_t r = 0; r < 4; ++r) {
        const double* dr = d + (b + r) * n;
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += dr[j] * w[j * k + c];
        g[(b + r) * k + c] = acc;
      }
    }
  }
  for (; b < batch; ++b) {
    const double* dr = d + b * n;
    double* out = g + b * k;
    for (std::size_t c = 0; c < k; ++c) out[c] = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const __m256d vc = _mm256_set1_pd(dr[j]);
      const double* row = w + j * k;
      std::size_t c = 0;
      for (; c + 4 <= k; c += 4) {
        _mm256_storeu_pd(out + c, _mm256_fmadd_pd(vc, _mm256_loadu_pd(row + c),
                                                  _mm256_loadu_pd(out + c)));
      }
      for (; c < k; ++c) out[c] += dr[j] * row[c];
    }
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{
      SimdLevel::kAvx2, axpby_avx2,      select_avx2,    dot_avx2, scaled_sq_dist_avx2,
      gemv_avx2,        gemm_nt_avx2,    gemm_tn_acc_avx2, gemm_nn_avx2,
  };
  return table;
}

}  // namespace fovdiff::simd
