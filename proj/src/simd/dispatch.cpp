// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <cstring>
#include <iostream>

#include "fovdiff/simd/kernels.hpp"

namespace fovdiff::simd {

#ifdef FOVDIFF_HAVE_AVX2
const KernelTable& avx2_kernels();
#endif

const char* to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::kScalar:
      return "scalar";
    case SimdLevel::kAvx2:
      return "avx2";
  }
  return "unknown";
}

bool cpu_supports(SimdLevel level) {
  switch (level) {
    case SimdLevel::kScalar:
      return true;
    case SimdLevel::kAvx2:
#if defined(FOVDIFF_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable* kernels_for(SimdLevel level) {
  if (!cpu_supports(level)) return nullptr;
  switch (level) {
    case SimdLevel::kScalar:
      return &scalar_kernels();
    case SimdLevel::kAvx2:
#ifdef FOVDIFF_HAVE_AVX2
      return &avx2_kernels();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

namespace {

const KernelTable& select_active() {
  const char* forced = std::getenv("FOVDIFF_SIMD");
  if (forced != nullptr && *forced != '\0') {
    if (std::strcmp(forced, "scalar") == 0) return scalar_kernels();
    if (std::strcmp(forced, "avx2") == 0) {
      if (const KernelTable* t = kernels_for(SimdLevel::kAvx2)) return *t;
      std::cerr << "fovdiff: FOVDIFF_SIMD=avx2 requested but unsupported, using scalar\n";
      return scalar_kernels();
    }
    std::cerr << "fovdiff: unknown FOVDIFF_SIMD value '" << forced << "', ignoring\n";
  }
  if (const KernelTable* t = kernels_for(SimdLevel::kAvx2)) return *t;
  return scalar_kernels();
}

}  // namespace

const KernelTable& kernels() {
  static const KernelTable& active = select_active();
  return active;
}

}  // namespace fovdiff::simd
