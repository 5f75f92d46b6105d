// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace fovdiff {

// Mixes a base seed and a stream index into an independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Source of standard-normal draws. Samplers only ever pull noise through
/// this interface so draw counts can be audited.
class NormalSource {
 public:
  virtual ~NormalSource() = default;
  virtual void fill_normal(std::span<double> out) = 0;
};

/// Seedable pseudorandom stream (mt19937_64). Bitwise reproducible from
/// (seed, stream) within one build.
class Rng : public NormalSource {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double normal();
  double uniform();                      // [0, 1)
  double uniform(double lo, double hi);  // [lo, hi)
  int uniform_int(int lo, int hi);       // inclusive

  void fill_normal(std::span<double> out) override;

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Decorator counting every normal draw that passes through it.
class CountingSource : public NormalSource {
 public:
  explicit CountingSource(NormalSource& inner) : inner_(inner) {}

  void fill_normal(std::span<double> out) override {
    draws_ += out.size();
    inner_.fill_normal(out);
  }

  std::uint64_t draws() const { return draws_; }

 private:
  NormalSource& inner_;
  std::uint64_t draws_ = 0;
};

}  // namespace fovdiff
