// Copyright 2026 The fovdiff Authors.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fovdiff/error.hpp"
#include "fovdiff/fov.hpp"
#include "fovdiff/rng.hpp"

namespace fovdiff {
namespace {

double mask_sum(const Grid& g) {
  double s = 0.0;
  for (double v : g.values()) s += v;
  return s;
}

Grid ramp(std::size_t rows, std::size_t cols) {
  Grid g(rows, cols, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = 0.01 * static_cast<double>(i) - 3.0;
  return g;
}

TEST(CircularFovMask, AreaApproximatesDisc) {
  const Grid m = circular_fov_mask(64, 64, 32.0, 32.0, 16.0);
  EXPECT_NEAR(mask_sum(m) / (std::numbers::pi * 256.0), 1.0, 0.02);
  for (double v : m.values()) EXPECT_TRUE(v == 0.0 || v == 1.0);
}

TEST(CircularFovMask, RadiusBeyondDiagonalCoversEverything) {
  const Grid m = circular_fov_mask(64, 64, 32.0, 32.0, 64.0 * std::sqrt(2.0));
  EXPECT_EQ(mask_sum(m), 64.0 * 64.0);
}

TEST(CircularFovMask, TinyRadiusBetweenPixelCentresIsEmpty) {
  // The nearest pixel centre to (32, 32) is 0.5*sqrt(2) away.
  const Grid m = circular_fov_mask(64, 64, 32.0, 32.0, 0.5);
  EXPECT_EQ(mask_sum(m), 0.0);
}

TEST(CircularFovMask, RejectsNonPositiveRadius) {
  EXPECT_THROW(circular_fov_mask(8, 8, 4.0, 4.0, 0.0), ValidationError);
  EXPECT_THROW(circular_fov_mask(8, 8, 4.0, 4.0, -1.0), ValidationError);
}

TEST(ApplyTruncation, AllOnesIsIdentity) {
  const Grid img = ramp(8, 8);
  EXPECT_EQ(apply_truncation(img, Grid(8, 8, 1.0), -1.0), img);
}

TEST(ApplyTruncation, AllZerosIsFill) {
  const Grid out = apply_truncation(ramp(8, 8), Grid(8, 8, 0.0), -1.0);
  for (double v : out.values()) EXPECT_EQ(v, -1.0);
}

TEST(ApplyTruncation, IdempotentAndKnownRegionExact) {
  const Grid img = ramp(32, 32);
  const Grid mask = circular_fov_mask(32, 32, 15.0, 17.0, 9.0);
  const Grid once = apply_truncation(img, mask, -1.0);
  EXPECT_EQ(apply_truncation(once, mask, -1.0), once);
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (mask[i] == 1.0) EXPECT_EQ(once[i], img[i]);
  }
}

TEST(ApplyTruncation, RejectsNonBinaryMaskAndShapeMismatch) {
  EXPECT_THROW(apply_truncation(ramp(4, 4), Grid(4, 4, 0.5), -1.0), ValidationError);
  EXPECT_THROW(apply_truncation(ramp(4, 4), Grid(4, 5, 1.0), -1.0), ShapeError);
}

TEST(GeneratePhantom, ZeroFatHasNoFatLabel) {
  PhantomConfig cfg;
  cfg.fat_min = 0.0;
  cfg.fat_max = 0.0;
  Rng rng(4);
  const Phantom p = generate_phantom(rng, cfg);
  for (double v : p.labels.values()) EXPECT_NE(v, static_cast<double>(kFat));
}

TEST(GeneratePhantom, DeterministicForSeed) {
  const PhantomConfig cfg;
  Rng a(99);
  Rng b(99);
  const Phantom pa = generate_phantom(a, cfg);
  const Phantom pb = generate_phantom(b, cfg);
  EXPECT_EQ(pa.image, pb.image);
  EXPECT_EQ(pa.labels, pb.labels);
}

TEST(GeneratePhantom, IntensitiesStayInTheirBands) {
  const PhantomConfig cfg;
  Rng rng(8);
  for (int trial = 0; trial < 20; ++trial) {
    const Phantom p = generate_phantom(rng, cfg);
    for (std::size_t i = 0; i < p.image.size(); ++i) {
      const double label = p.labels[i];
      const double v = p.image[i];
      if (label == kBackground) EXPECT_EQ(v, cfg.background);
      if (label == kFat) EXPECT_TRUE(cfg.fat.contains(v));
      if (label == kSoftTissue) EXPECT_TRUE(cfg.soft_tissue.contains(v));
    }
  }
}

TEST(GeneratePhantom, FatFractionInPlausibleRange) {
  const PhantomConfig cfg;
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const Phantom p = generate_phantom(rng, cfg);
    double fat = 0.0;
    double tissue = 0.0;
    for (double v : p.labels.values()) {
      if (v != kBackground) tissue += 1.0;
      if (v == kFat) fat += 1.0;
    }
    ASSERT_GT(tissue, 0.0);
    EXPECT_GE(fat / tissue, 0.05) << "trial " << trial;
    EXPECT_LE(fat / tissue, 0.30) << "trial " << trial;
  }
}

TEST(PhantomConfig, Validation) {
  PhantomConfig small;
  small.rows = 3;
  EXPECT_THROW(small.validate(), ValidationError);
  PhantomConfig unordered;
  unordered.fat_min = 0.05;
  unordered.fat_max = 0.01;
  EXPECT_THROW(unordered.validate(), ValidationError);
  PhantomConfig overlapping;
  overlapping.fat = {-0.1, 0.1};
  EXPECT_THROW(overlapping.validate(), ValidationError);
  EXPECT_NO_THROW(PhantomConfig{}.validate());
}

TEST(Tci, FullMaskIsZero) {
  Rng rng(1);
  const Phantom p = generate_phantom(rng, PhantomConfig{});
  EXPECT_EQ(tci(p.labels, Grid(64, 64, 1.0)), 0.0);
}

TEST(Tci, CountsTissueOutsideMask) {
  // 10 tissue pixels, one of which lies outside.
  Grid labels(4, 4, 0.0);
  Grid mask(4, 4, 1.0);
  for (std::size_t i = 0; i < 10; ++i) labels[i] = (i % 2 == 0) ? kSoftTissue : kFat;
  mask[3] = 0.0;
  mask[15] = 0.0;  // background, does not count
  EXPECT_DOUBLE_EQ(tci(labels, mask), 0.1);
}

TEST(Tci, ComplementMaskGivesComplement) {
  Rng rng(2);
  const Phantom p = generate_phantom(rng, PhantomConfig{});
  const Grid m = circular_fov_mask(64, 64, 30.0, 34.0, 20.0);
  Grid inv = m;
  for (auto& v : inv.values()) v = 1.0 - v;
  EXPECT_NEAR(tci(p.labels, m) + tci(p.labels, inv), 1.0, 1e-12);
}

TEST(Tci, NonIncreasingInRadius) {
  Rng rng(3);
  const Phantom p = generate_phantom(rng, PhantomConfig{});
  double last = 1.0;
  for (int i = 1; i <= 20; ++i) {
    const double value = tci(p.labels, circular_fov_mask(64, 64, 32.0, 32.0, 2.0 * i));
    EXPECT_LE(value, last) << "radius " << 2.0 * i;
    last = value;
  }
}

TEST(Tci, RejectsLabelsWithoutTissue) {
  EXPECT_THROW(tci(Grid(4, 4, 0.0), Grid(4, 4, 1.0)), ValidationError);
}

TEST(SampleTruncation, TciInsideConfiguredRange) {
  TruncationConfig cfg;
  cfg.tci_min = 0.1;
  cfg.tci_max = 0.3;
  Rng rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Phantom p = generate_phantom(rng, PhantomConfig{});
    const Truncation t = sample_truncation(rng, p, cfg);
    EXPECT_GE(t.tci, 0.1);
    EXPECT_LE(t.tci, 0.3);
    EXPECT_EQ(t.tci, tci(p.labels, t.mask));
    EXPECT_EQ(t.mask, circular_fov_mask(64, 64, t.center_row, t.center_col, t.radius));
  }
}

TEST(SampleTruncation, UnreachableRangeThrows) {
  TruncationConfig cfg;
  cfg.radius_min = 0.45;
  cfg.radius_max = 0.5;
  cfg.center_jitter = 0.0;
  cfg.tci_min = 0.9;
  cfg.tci_max = 1.0;
  cfg.max_attempts = 20;
  Rng rng(5);
  const Phantom p = generate_phantom(rng, PhantomConfig{});
  EXPECT_THROW(sample_truncation(rng, p, cfg), ValidationError);
}

}  // namespace
}  // namespace fovdiff
