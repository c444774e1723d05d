// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_FEATURE_SAMPLER_HPP_
#define AFSL_FEATURE_SAMPLER_HPP_

#include <span>
#include <vector>

#include "afsl/geometry.hpp"
#include "afsl/tensor.hpp"

namespace afsl {

/// The two backbone taps, each (C, H, W).
struct FeaturePair {
  Tensor level1;  // stride 8
  Tensor level2;  // stride 16
  int stride1 = 8;
  int stride2 = 16;
};

struct GridPoint {
  double x = 0;
  double y = 0;
};

/// Row-major h x w sampling positions in feature-map units, with pixel
/// (i, j) of the map centred at (j, i), 1-based.
struct SampleGrid {
  int h = 0;
  int w = 0;
  std::vector<GridPoint> positions;
};

enum class GridConvention {
  kCellCenters,        // x = x0 + (j - 0.5) * w / w_s
  kEndpointsInclusive  // x = x0 + (j - 1) * w / (w_s - 1)
};

SampleGrid make_grid(const BBox& box, int h_s, int w_s,
                     GridConvention convention = GridConvention::kCellCenters);

/// Bilinear resampling of a (C, H, W) map at the grid positions:
///   out(c, i', j') = sum_{i,j} F(c, i, j) max(0, 1 - |y - i|) max(0, 1 - |x - j|)
/// Only the (at most) four non-zero terms are visited. Positions more than a
/// pixel outside the map read zero.
Tensor sbr_sample(const Tensor& feature, const SampleGrid& grid);

/// Adjoint of sbr_sample: scatters `upstream` (C, h, w) back onto a map of
/// `feature_dims` with the same bilinear weights.
Tensor sbr_backward(const Shape& feature_dims, const SampleGrid& grid,
                    const Tensor& upstream);

/// Per-candidate features, (C, 6, 6) and (C, 8, 8) with the default config.
struct SampledFeatures {
  Tensor sbrf1;
  Tensor sbrf2;
};

struct SamplerConfig {
  int sbrf1_h = 6;
  int sbrf1_w = 6;
  int sbrf2_h = 8;
  int sbrf2_w = 8;
  /// When set, SBRF1 is read from level2 and SBRF2 from level1.
  bool swap_levels = false;
  GridConvention grid = GridConvention::kCellCenters;
};

/// Sampling box of a patch-space box on a map of the given stride.
BBox feature_box(const BBox& patch_box, int stride);

SampledFeatures sample_two_level(const FeaturePair& features,
                                 const BBox& patch_box,
                                 const SamplerConfig& config);

/// Batched variant: returns (N, C, h1, w1) and (N, C, h2, w2) tensors.
struct SampledBatch {
  Tensor sbrf1;
  Tensor sbrf2;
  std::size_t size() const { return sbrf1.empty() ? 0 : sbrf1.dim(0); }
};

/// `threads` > 1 splits the candidates across worker threads; each
/// candidate is computed identically either way.
SampledBatch sample_batch(const FeaturePair& features,
                          std::span<const BBox> patch_boxes,
                          const SamplerConfig& config, int threads = 1);

}  // namespace afsl

#endif  // AFSL_FEATURE_SAMPLER_HPP_
