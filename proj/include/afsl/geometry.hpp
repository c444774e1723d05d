// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_GEOMETRY_HPP_
#define AFSL_GEOMETRY_HPP_

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "afsl/tensor.hpp"

namespace afsl {

/// Axis-aligned box. In image space (x, y) is the 1-based index of the
/// top-left pixel, so the box covers the continuous span
/// [x - 0.5, x + w - 0.5] with pixel centres at integers. Patch-space boxes
/// are plain offsets from the crop origin scaled by the resize factors.
struct BBox {
  double x = 0;
  double y = 0;
  double w = 1;
  double h = 1;

  double center_x() const { return x + w / 2; }
  double center_y() const { return y + h / 2; }
  double area() const { return w * h; }
  bool valid() const;

  static BBox from_center(double cx, double cy, double w, double h) {
    return {cx - w / 2, cy - h / 2, w, h};
  }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Crop-and-resize transform from an image to the network input patch.
struct PatchSpec {
  BBox crop_rect;
  int out_w = 0;
  int out_h = 0;
  double scale_x = 1;  // patch pixels per image pixel
  double scale_y = 1;
  int image_w = 0;
  int image_h = 0;
};

/// Patch geometry around `prev_box`: the crop is min(r_c * w, W) by
/// min(r_c * h, H), centred on the box and shifted to stay inside the
/// image; it is resized so the box becomes L pixels on each side:
///   out_w = round((L / w) * min(r_c * w, W))   (same for height)
PatchSpec crop_and_resize_spec(const BBox& prev_box, int image_w, int image_h,
                               double r_c, int L);

/// Bilinear resize of the crop region of a (C, H, W) image into a
/// (C, out_h, out_w) patch. Samples outside the image read as zero.
Tensor extract_patch(const Tensor& image, const PatchSpec& spec);

BBox map_box_to_patch(const BBox& box, const PatchSpec& spec);
BBox map_box_to_image(const BBox& box, const PatchSpec& spec);

double iou(const BBox& a, const BBox& b);

/// Region candidate centres are clamped into, with a cap on box size.
struct SampleRegion {
  double width = 0;
  double height = 0;
};

/// Gaussian proposals around `center`: translation std
/// trans_sigma * mean(w, h) per axis, scale factor 1.05^g with g ~ N(0,
/// scale_sigma). With a region, centres are clamped into it and the size is
/// capped at the region size.
std::vector<BBox> sample_candidates(const BBox& center, int n,
                                    double trans_sigma, double scale_sigma,
                                    std::mt19937_64& rng,
                                    std::optional<SampleRegion> region = {});
std::vector<BBox> sample_candidates(const BBox& center, int n,
                                    double trans_sigma, double scale_sigma,
                                    std::uint64_t rng_seed,
                                    std::optional<SampleRegion> region = {});

enum class Label { kNegative = 1, kPositive = 2 };

struct LabeledSample {
  BBox box;
  Label label = Label::kNegative;
  double iou = 0;
};

/// IoU >= pos_thresh -> positive, IoU <= neg_thresh -> negative, anything in
/// between is dropped.
std::vector<LabeledSample> label_samples(std::span<const BBox> candidates,
                                         const BBox& gt, double pos_thresh,
                                         double neg_thresh);

}  // namespace afsl

#endif  // AFSL_GEOMETRY_HPP_
