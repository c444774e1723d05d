// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace afsl {

bool BBox::valid() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(w) &&
         std::isfinite(h) && w > 0 && h > 0;
}

namespace {

int round_half_up(double v) { return static_cast<int>(std::floor(v + 0.5)); }

// Bilinear read at continuous image coordinates (pixel centres at 1..W).
// Inside the image footprint [0.5, W + 0.5] the border pixels are
// replicated; outside it the image reads as zero.
Scalar sample_image(const Tensor& image, std::size_t c, double u, double v) {
  const auto h = static_cast<double>(image.dim(1));
  const auto w = static_cast<double>(image.dim(2));
  if (u < 0.5 || v < 0.5 || u > w + 0.5 || v > h + 0.5) return 0;
  u = std::clamp(u, 1.0, w);
  v = std::clamp(v, 1.0, h);
  const double x0 = std::floor(u), y0 = std::floor(v);
  const double fx = u - x0, fy = v - y0;
  const auto ix0 = static_cast<std::size_t>(x0) - 1;
  const auto iy0 = static_cast<std::size_t>(y0) - 1;
  const std::size_t ix1 = std::min(ix0 + 1, image.dim(2) - 1);
  const std::size_t iy1 = std::min(iy0 + 1, image.dim(1) - 1);
  const Scalar top = image.at(c, iy0, ix0) * (1 - fx) + image.at(c, iy0, ix1) * fx;
  const Scalar bottom = image.at(c, iy1, ix0) * (1 - fx) + image.at(c, iy1, ix1) * fx;
  return top * (1 - fy) + bottom * fy;
}

}  // namespace

PatchSpec crop_and_resize_spec(const BBox& prev_box, int image_w, int image_h,
                               double r_c, int L) {
  if (!prev_box.valid() || prev_box.w < 1 || prev_box.h < 1) {
    throw std::invalid_argument("crop_and_resize_spec: degenerate box " +
                                std::to_string(prev_box.w) + "x" +
                                std::to_string(prev_box.h));
  }
  if (image_w < 1 || image_h < 1 || !(r_c >= 1) || L < 16) {
    throw std::invalid_argument(
        "crop_and_resize_spec: needs a non-empty image, r_c >= 1 and L >= 16");
  }
  const double crop_w = std::min(r_c * prev_box.w, static_cast<double>(image_w));
  const double crop_h = std::min(r_c * prev_box.h, static_cast<double>(image_h));

  PatchSpec spec;
  spec.image_w = image_w;
  spec.image_h = image_h;
  spec.out_w = std::max(1, round_half_up(L / prev_box.w * crop_w));
  spec.out_h = std::max(1, round_half_up(L / prev_box.h * crop_h));

  // Centre on the box, then shift so the crop stays on the image, whose
  // footprint as a box is (1, 1, W, H).
  BBox crop = BBox::from_center(prev_box.center_x(), prev_box.center_y(),
                                crop_w, crop_h);
  crop.x = std::clamp(crop.x, 1.0, image_w + 1.0 - crop_w);
  crop.y = std::clamp(crop.y, 1.0, image_h + 1.0 - crop_h);
  spec.crop_rect = crop;
  spec.scale_x = spec.out_w / crop_w;
  spec.scale_y = spec.out_h / crop_h;
  return spec;
}

Tensor extract_patch(const Tensor& image, const PatchSpec& spec) {
  if (image.rank() != 3) {
    throw std::invalid_argument("extract_patch expects a (C,H,W) image, got " +
                                shape_string(image.dims()));
  }
  const std::size_t channels = image.dim(0);
  const auto out_h = static_cast<std::size_t>(spec.out_h);
  const auto out_w = static_cast<std::size_t>(spec.out_w);
  Tensor patch({channels, out_h, out_w});
  const double origin_x = spec.crop_rect.x - 0.5;
  const double origin_y = spec.crop_rect.y - 0.5;
  for (std::size_t c = 0; c < channels; ++c) {
    for (std::size_t py = 0; py < out_h; ++py) {
      const double v = origin_y + (static_cast<double>(py) + 0.5) / spec.scale_y;
      for (std::size_t px = 0; px < out_w; ++px) {
        const double u = origin_x + (static_cast<double>(px) + 0.5) / spec.scale_x;
        patch.at(c, py, px) = sample_image(image, c, u, v);
      }
    }
  }
  return patch;
}

BBox map_box_to_patch(const BBox& box, const PatchSpec& spec) {
  return {(box.x - spec.crop_rect.x) * spec.scale_x,
          (box.y - spec.crop_rect.y) * spec.scale_y, box.w * spec.scale_x,
          box.h * spec.scale_y};
}

BBox map_box_to_image(const BBox& box, const PatchSpec& spec) {
  return {box.x / spec.scale_x + spec.crop_rect.x,
          box.y / spec.scale_y + spec.crop_rect.y, box.w / spec.scale_x,
          box.h / spec.scale_y};
}

double iou(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (!(uni > 0)) return 0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

std::vector<BBox> sample_candidates(const BBox& center, int n,
                                    double trans_sigma, double scale_sigma,
                                    std::mt19937_64& rng,
                                    std::optional<SampleRegion> region) {
  if (n < 1 || trans_sigma < 0 || scale_sigma < 0) {
    throw std::invalid_argument("sample_candidates: needs n >= 1 and sigmas >= 0");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  const double trans_std = trans_sigma * (center.w + center.h) / 2;
  std::vector<BBox> boxes;
  boxes.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double dx = trans_std * normal(rng);
    const double dy = trans_std * normal(rng);
    const double scale = std::pow(1.05, scale_sigma * normal(rng));
    double w = center.w * scale;
    double h = center.h * scale;
    double cx_shift = dx;
    double cy_shift = dy;
    if (region) {
      w = std::min(w, region->width);
      h = std::min(h, region->height);
      cx_shift = std::clamp(center.center_x() + dx, 0.0, region->width) -
                 center.center_x();
      cy_shift = std::clamp(center.center_y() + dy, 0.0, region->height) -
                 center.center_y();
    }
    // Written as an offset of the original corner so zero noise reproduces
    // `center` bit for bit.
    boxes.push_back({center.x + cx_shift + (center.w - w) / 2,
                     center.y + cy_shift + (center.h - h) / 2, w, h});
  }
  return boxes;
}

std::vector<BBox> sample_candidates(const BBox& center, int n,
                                    double trans_sigma, double scale_sigma,
                                    std::uint64_t rng_seed,
                                    std::optional<SampleRegion> region) {
  std::mt19937_64 rng(rng_seed);
  return sample_candidates(center, n, trans_sigma, scale_sigma, rng, region);
}

std::vector<LabeledSample> label_samples(std::span<const BBox> candidates,
                                         const BBox& gt, double pos_thresh,
                                         double neg_thresh) {
  if (!(pos_thresh > neg_thresh)) {
    throw std::invalid_argument("label_samples: pos_thresh must exceed neg_thresh");
  }
  std::vector<LabeledSample> out;
  for (const BBox& box : candidates) {
    const double overlap = iou(box, gt);
    if (overlap >= pos_thresh) {
      out.push_back({box, Label::kPositive, overlap});
    } else if (overlap <= neg_thresh) {
      out.push_back({box, Label::kNegative, overlap});
    }
  }
  return out;
}

}  // namespace afsl
