// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "afsl/geometry.hpp"
#include "support/oracles.hpp"

namespace afsl {
namespace {

// ---- crop_and_resize_spec -------------------------------------------------------

TEST(CropSpec, OutputSizeRoundsToNearest) {
  const PatchSpec s = crop_and_resize_spec({100, 100, 50, 40}, 640, 480, 1.2, 112);
  EXPECT_EQ(s.out_w, 134);  // 134.4
  EXPECT_EQ(s.out_h, 134);
}

TEST(CropSpec, ClampedBranchUsesImageWidth) {
  const PatchSpec s = crop_and_resize_spec({20, 100, 600, 40}, 640, 480, 1.2, 112);
  EXPECT_EQ(s.out_w, 119);  // round(112 / 600 * 640)
}

TEST(CropSpec, TargetFillingImageGivesL) {
  const PatchSpec s = crop_and_resize_spec({1, 1, 640, 480}, 640, 480, 1.2, 112);
  EXPECT_EQ(s.out_w, 112);
  EXPECT_EQ(s.out_h, 112);
}

TEST(CropSpec, CropCentredAndKeptOnImage) {
  const PatchSpec mid = crop_and_resize_spec({101, 101, 50, 40}, 640, 480, 2.0, 112);
  EXPECT_DOUBLE_EQ(mid.crop_rect.center_x(), (BBox{101, 101, 50, 40}.center_x()));
  EXPECT_DOUBLE_EQ(mid.crop_rect.w, 100);
  const PatchSpec corner = crop_and_resize_spec({1, 1, 50, 40}, 640, 480, 2.0, 112);
  EXPECT_DOUBLE_EQ(corner.crop_rect.x, 1);
  EXPECT_DOUBLE_EQ(corner.crop_rect.y, 1);
}

TEST(CropSpec, RejectsDegenerateBox) {
  EXPECT_THROW(crop_and_resize_spec({10, 10, 0.5, 20}, 640, 480, 1.2, 112), std::invalid_argument);
  EXPECT_THROW(crop_and_resize_spec({10, 10, 20, 0.9}, 640, 480, 1.2, 112), std::invalid_argument);
}

TEST(CropSpec, OutputWithinBoundsForRandomBoxes) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const int W = 32 + static_cast<int>(u(rng) * 600), H = 32 + static_cast<int>(u(rng) * 400);
    const double w = 1 + u(rng) * (W - 1), h = 1 + u(rng) * (H - 1);
    const double r_c = 1 + u(rng) * 2;
    const PatchSpec s = crop_and_resize_spec({1 + u(rng) * (W - w), 1 + u(rng) * (H - h), w, h},
                                             W, H, r_c, 112);
    EXPECT_GE(s.out_w, 1);
    EXPECT_LE(s.out_w, static_cast<int>(std::floor(112 * r_c + 0.5)));
    EXPECT_LE(s.out_h, static_cast<int>(std::floor(112 * r_c + 0.5)));
  }
}

// ---- extract_patch ----------------------------------------------------------------

TEST(ExtractPatch, WholeImageAtSameSizeIsIdentity) {
  std::mt19937_64 rng(2);
  const Tensor image = oracle::random_tensor({3, 7, 9}, rng, 0, 1);
  PatchSpec s;
  s.crop_rect = {1, 1, 9, 7};
  s.out_w = 9;
  s.out_h = 7;
  s.image_w = 9;
  s.image_h = 7;
  EXPECT_LT(max_abs_diff(extract_patch(image, s), image), 1e-15);
}

TEST(ExtractPatch, ConstantImageGivesConstantPatch) {
  const Tensor image({3, 40, 50}, 0.25);
  const PatchSpec s = crop_and_resize_spec({10, 10, 20, 15}, 50, 40, 1.5, 32);
  const Tensor patch = extract_patch(image, s);
  for (Scalar v : patch.values()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(ExtractPatch, BilinearMidpoint) {
  const Tensor image({1, 2, 2}, std::vector<Scalar>{1, 2, 3, 4});
  PatchSpec s;
  s.crop_rect = {1, 1, 2, 2};
  s.out_w = 1;
  s.out_h = 1;
  s.scale_x = 0.5;
  s.scale_y = 0.5;
  s.image_w = 2;
  s.image_h = 2;
  EXPECT_DOUBLE_EQ(extract_patch(image, s)[0], 2.5);
}

TEST(ExtractPatch, OutsideImageReadsZero) {
  const Tensor image({1, 4, 4}, 1.0);
  PatchSpec s;
  s.crop_rect = {-7, 1, 4, 4};
  s.out_w = 4;
  s.out_h = 4;
  s.image_w = 4;
  s.image_h = 4;
  const Tensor patch = extract_patch(image, s);
  for (Scalar v : patch.values()) EXPECT_EQ(v, 0);
}

// ---- box mapping ------------------------------------------------------------------

TEST(MapBox, UnitSpecIsIdentity) {
  PatchSpec s;
  s.crop_rect = {0, 0, 10, 10};
  const BBox b{3, 4, 5, 6};
  EXPECT_EQ(map_box_to_patch(b, s), b);
}

TEST(MapBox, HandAffineArithmetic) {
  PatchSpec s;
  s.crop_rect = {100, 50, 40, 40};
  s.scale_x = s.scale_y = 2;
  const BBox p = map_box_to_patch({110, 60, 10, 10}, s);
  EXPECT_EQ(p, (BBox{20, 20, 20, 20}));
}

TEST(MapBox, RoundTripRandom) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const BBox prev{1 + 200 * u(rng), 1 + 200 * u(rng), 5 + 80 * u(rng), 5 + 80 * u(rng)};
    const PatchSpec s = crop_and_resize_spec(prev, 320, 240, 1 + 2 * u(rng), 16 + static_cast<int>(150 * u(rng)));
    const BBox b{300 * u(rng), 200 * u(rng), 1 + 60 * u(rng), 1 + 60 * u(rng)};
    const BBox r = map_box_to_image(map_box_to_patch(b, s), s);
    EXPECT_NEAR(r.x, b.x, 1e-9);
    EXPECT_NEAR(r.y, b.y, 1e-9);
    EXPECT_NEAR(r.w, b.w, 1e-9);
    EXPECT_NEAR(r.h, b.h, 1e-9);
  }
}

// ---- iou ----------------------------------------------------------------------------

TEST(Iou, Examples) {
  EXPECT_EQ(iou({3, 4, 5, 6}, {3, 4, 5, 6}), 1);
  EXPECT_EQ(iou({0, 0, 2, 2}, {5, 5, 2, 2}), 0);
  EXPECT_NEAR(iou({0, 0, 2, 2}, {1, 1, 2, 2}), 1.0 / 7.0, 1e-15);
}

TEST(Iou, SymmetricAndBounded) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 1000; ++i) {
    const BBox a{20 * u(rng), 20 * u(rng), 0.1 + 10 * u(rng), 0.1 + 10 * u(rng)};
    const BBox b{20 * u(rng), 20 * u(rng), 0.1 + 10 * u(rng), 0.1 + 10 * u(rng)};
    EXPECT_EQ(iou(a, b), iou(b, a));
    EXPECT_GE(iou(a, b), 0);
    EXPECT_LE(iou(a, b), 1);
    EXPECT_NEAR(iou(a, a), 1, 1e-12);
  }
}

// ---- candidates ---------------------------------------------------------------------

TEST(Candidates, ZeroSigmaReproducesCentre) {
  const BBox c{12.5, 7.25, 30, 20};
  for (const BBox& b : sample_candidates(c, 50, 0, 0, 3)) EXPECT_EQ(b, c);
}

TEST(Candidates, DeterministicPerSeed) {
  const BBox c{12.5, 7.25, 30, 20};
  EXPECT_EQ(sample_candidates(c, 100, 0.1, 0.5, 77), sample_candidates(c, 100, 0.1, 0.5, 77));
  EXPECT_NE(sample_candidates(c, 100, 0.1, 0.5, 77), sample_candidates(c, 100, 0.1, 0.5, 78));
}

TEST(Candidates, EmpiricalMeanCentre) {
  const BBox c{100, 80, 40, 30};
  const auto boxes = sample_candidates(c, 10000, 0.1, 0.5, 5);
  double mx = 0, my = 0;
  for (const BBox& b : boxes) {
    mx += b.center_x();
    my += b.center_y();
  }
  mx /= boxes.size();
  my /= boxes.size();
  EXPECT_NEAR(mx, c.center_x(), 0.01 * c.center_x());
  EXPECT_NEAR(my, c.center_y(), 0.01 * c.center_y());
}

TEST(Candidates, ClampedIntoRegion) {
  const BBox c{10, 10, 30, 30};
  const SampleRegion region{60, 50};
  for (const BBox& b : sample_candidates(c, 2000, 2.0, 3.0, 6, region)) {
    EXPECT_GE(b.center_x(), 0);
    EXPECT_LE(b.center_x(), region.width);
    EXPECT_GE(b.center_y(), 0);
    EXPECT_LE(b.center_y(), region.height);
    EXPECT_LE(b.w, region.width);
    EXPECT_LE(b.h, region.height);
  }
}

// ---- labelling -----------------------------------------------------------------------

TEST(LabelSamples, Examples) {
  const BBox gt{0, 0, 10, 10};
  const std::vector<BBox> boxes{gt, {50, 50, 10, 10}, {0, 0, 10, 5}};
  const auto labeled = label_samples(boxes, gt, 0.7, 0.3);
  ASSERT_EQ(labeled.size(), 2u);  // IoU 0.5 dropped
  EXPECT_EQ(labeled[0].label, Label::kPositive);
  EXPECT_EQ(labeled[0].iou, 1);
  EXPECT_EQ(labeled[1].label, Label::kNegative);
}

TEST(LabelSamples, PartitionIsExhaustiveAndExclusive) {
  const BBox gt{40, 40, 30, 30};
  const auto boxes = sample_candidates(gt, 3000, 0.5, 1.0, 8);
  const auto labeled = label_samples(boxes, gt, 0.7, 0.3);
  std::size_t dropped = 0;
  for (const BBox& b : boxes) {
    const double o = iou(b, gt);
    if (o > 0.3 && o < 0.7) ++dropped;
  }
  EXPECT_EQ(labeled.size() + dropped, boxes.size());
  for (const LabeledSample& s : labeled) {
    EXPECT_EQ(s.label == Label::kPositive, s.iou >= 0.7);
    EXPECT_EQ(s.label == Label::kNegative, s.iou <= 0.3);
  }
}

TEST(LabelSamples, RejectsInvertedThresholds) {
  const std::vector<BBox> boxes{{0, 0, 1, 1}};
  EXPECT_THROW(label_samples(boxes, {0, 0, 1, 1}, 0.3, 0.7), std::invalid_argument);
}

}  // namespace
}  // namespace afsl
