// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/feature_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace afsl {

namespace {

// The up-to-four pixels with non-zero weight for one sample position.
struct Taps {
  long row[2];
  long col[2];
  double wy[2];
  double wx[2];
};

// Kernel weights are written as 1 - |p - i| for both neighbours so the
// result is term-for-term the same as the full double sum.
Taps taps_for(const GridPoint& p) {
  Taps t{};
  const double y0 = std::floor(p.y), x0 = std::floor(p.x);
  t.row[0] = static_cast<long>(y0);
  t.row[1] = t.row[0] + 1;
  t.col[0] = static_cast<long>(x0);
  t.col[1] = t.col[0] + 1;
  t.wy[0] = 1 - (p.y - y0);
  t.wy[1] = 1 - (y0 + 1 - p.y);
  t.wx[0] = 1 - (p.x - x0);
  t.wx[1] = 1 - (x0 + 1 - p.x);
  return t;
}

void sample_into(const Tensor& feature, const SampleGrid& grid, Scalar* out) {
  const std::size_t channels = feature.dim(0);
  const auto h = static_cast<long>(feature.dim(1));
  const auto w = static_cast<long>(feature.dim(2));
  const std::size_t plane = feature.dim(1) * feature.dim(2);
  const std::size_t points = grid.positions.size();
  std::fill(out, out + channels * points, Scalar{0});
  for (std::size_t p = 0; p < points; ++p) {
    const Taps t = taps_for(grid.positions[p]);
    for (int a = 0; a < 2; ++a) {
      if (t.row[a] < 1 || t.row[a] > h || t.wy[a] <= 0) continue;
      for (int b = 0; b < 2; ++b) {
        if (t.col[b] < 1 || t.col[b] > w || t.wx[b] <= 0) continue;
        const double weight = t.wy[a] * t.wx[b];
        const std::size_t offset =
            static_cast<std::size_t>((t.row[a] - 1) * w + (t.col[b] - 1));
        const Scalar* src = feature.data() + offset;
        for (std::size_t c = 0; c < channels; ++c) {
          out[c * points + p] += src[c * plane] * weight;
        }
      }
    }
  }
}

void check_feature(const Tensor& feature) {
  if (feature.rank() != 3) {
    throw std::invalid_argument("SBR expects a (C,H,W) map, got " +
                                shape_string(feature.dims()));
  }
}

}  // namespace

SampleGrid make_grid(const BBox& box, int h_s, int w_s,
                     GridConvention convention) {
  if (h_s < 1 || w_s < 1) {
    throw std::invalid_argument("make_grid: grid extents must be >= 1");
  }
  SampleGrid grid{h_s, w_s, {}};
  grid.positions.reserve(static_cast<std::size_t>(h_s * w_s));
  auto coord = [convention](double origin, double extent, int count, int k) {
    if (convention == GridConvention::kEndpointsInclusive && count > 1) {
      return origin + (k - 1) * extent / (count - 1);
    }
    return origin + (k - 0.5) * extent / count;
  };
  for (int i = 1; i <= h_s; ++i) {
    const double y = coord(box.y, box.h, h_s, i);
    for (int j = 1; j <= w_s; ++j) {
      grid.positions.push_back({coord(box.x, box.w, w_s, j), y});
    }
  }
  return grid;
}

Tensor sbr_sample(const Tensor& feature, const SampleGrid& grid) {
  check_feature(feature);
  Tensor out({feature.dim(0), static_cast<std::size_t>(grid.h),
              static_cast<std::size_t>(grid.w)});
  sample_into(feature, grid, out.data());
  return out;
}

Tensor sbr_backward(const Shape& feature_dims, const SampleGrid& grid,
                    const Tensor& upstream) {
  Tensor grad(feature_dims);
  check_feature(grad);
  const std::size_t channels = feature_dims[0];
  const auto h = static_cast<long>(feature_dims[1]);
  const auto w = static_cast<long>(feature_dims[2]);
  const std::size_t plane = feature_dims[1] * feature_dims[2];
  const std::size_t points = grid.positions.size();
  if (upstream.size() != channels * points) {
    throw std::invalid_argument("sbr_backward: upstream " +
                                shape_string(upstream.dims()) +
                                " does not match grid for " +
                                shape_string(feature_dims));
  }
  for (std::size_t p = 0; p < points; ++p) {
    const Taps t = taps_for(grid.positions[p]);
    for (int a = 0; a < 2; ++a) {
      if (t.row[a] < 1 || t.row[a] > h || t.wy[a] <= 0) continue;
      for (int b = 0; b < 2; ++b) {
        if (t.col[b] < 1 || t.col[b] > w || t.wx[b] <= 0) continue;
        const double weight = t.wy[a] * t.wx[b];
        const std::size_t offset =
            static_cast<std::size_t>((t.row[a] - 1) * w + (t.col[b] - 1));
        for (std::size_t c = 0; c < channels; ++c) {
          grad[c * plane + offset] += upstream[c * points + p] * weight;
        }
      }
    }
  }
  return grad;
}

BBox feature_box(const BBox& patch_box, int stride) {
  const double s = stride;
  return {patch_box.x / s, patch_box.y / s, patch_box.w / s, patch_box.h / s};
}

SampledFeatures sample_two_level(const FeaturePair& features,
                                 const BBox& patch_box,
                                 const SamplerConfig& config) {
  const Tensor& map1 = config.swap_levels ? features.level2 : features.level1;
  const Tensor& map2 = config.swap_levels ? features.level1 : features.level2;
  const int stride1 = config.swap_levels ? features.stride2 : features.stride1;
  const int stride2 = config.swap_levels ? features.stride1 : features.stride2;
  return {sbr_sample(map1, make_grid(feature_box(patch_box, stride1),
                                     config.sbrf1_h, config.sbrf1_w, config.grid)),
          sbr_sample(map2, make_grid(feature_box(patch_box, stride2),
                                     config.sbrf2_h, config.sbrf2_w, config.grid))};
}

SampledBatch sample_batch(const FeaturePair& features,
                          std::span<const BBox> patch_boxes,
                          const SamplerConfig& config, int threads) {
  if (patch_boxes.empty()) return {};
  const Tensor& map1 = config.swap_levels ? features.level2 : features.level1;
  const Tensor& map2 = config.swap_levels ? features.level1 : features.level2;
  check_feature(map1);
  check_feature(map2);
  const int stride1 = config.swap_levels ? features.stride2 : features.stride1;
  const int stride2 = config.swap_levels ? features.stride1 : features.stride2;
  const std::size_t n = patch_boxes.size();
  const auto h1 = static_cast<std::size_t>(config.sbrf1_h);
  const auto w1 = static_cast<std::size_t>(config.sbrf1_w);
  const auto h2 = static_cast<std::size_t>(config.sbrf2_h);
  const auto w2 = static_cast<std::size_t>(config.sbrf2_w);
  SampledBatch batch{Tensor({n, map1.dim(0), h1, w1}),
                     Tensor({n, map2.dim(0), h2, w2})};
  const std::size_t item1 = map1.dim(0) * h1 * w1;
  const std::size_t item2 = map2.dim(0) * h2 * w2;

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const BBox& box = patch_boxes[i];
      sample_into(map1,
                  make_grid(feature_box(box, stride1), config.sbrf1_h,
                            config.sbrf1_w, config.grid),
                  batch.sbrf1.data() + i * item1);
      sample_into(map2,
                  make_grid(feature_box(box, stride2), config.sbrf2_h,
                            config.sbrf2_w, config.grid),
                  batch.sbrf2.data() + i * item2);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), n);
  if (workers <= 1) {
    work(0, n);
    return batch;
  }
  {
    std::vector<std::jthread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t begin = 0; begin < n; begin += chunk) {
      pool.emplace_back(work, begin, std::min(n, begin + chunk));
    }
  }  // joined here
  return batch;
}

}  // namespace afsl
