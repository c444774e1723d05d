// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/adversarial_mask.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "afsl/layers.hpp"

namespace afsl {

IndexRange block_range(int index_m, int extent_s, int extent_m) {
  if (index_m < 1 || extent_m < index_m || extent_s < extent_m) {
    throw std::invalid_argument(
        "block_range needs 1 <= index_m <= extent_m <= extent_s, got index_m=" +
        std::to_string(index_m) + " extent_m=" + std::to_string(extent_m) +
        " extent_s=" + std::to_string(extent_s));
  }
  // floor(a / M + 1/2) == floor((2a + M) / 2M) for non-negative integers.
  auto boundary = [extent_s, extent_m](int m) {
    return (2 * m * extent_s + extent_m) / (2 * extent_m);
  };
  return {boundary(index_m - 1) + 1, boundary(index_m)};
}

BinaryMask BinaryMask::ones(int h, int w) {
  return {h, w, std::vector<std::uint8_t>(static_cast<std::size_t>(h * w), 1), {}};
}

namespace {

BinaryMask expand_cells(int h_m, int w_m, const std::vector<int>& cells, int h_s,
                        int w_s) {
  if (h_m < 1 || w_m < 1 || h_s < h_m || w_s < w_m) {
    throw std::invalid_argument("mask expansion from " + std::to_string(h_m) +
                                "x" + std::to_string(w_m) + " to " +
                                std::to_string(h_s) + "x" + std::to_string(w_s));
  }
  BinaryMask out = BinaryMask::ones(h_s, w_s);
  out.zeroed_cells = cells;
  for (int cell : cells) {
    const IndexRange rows = block_range(cell / w_m + 1, h_s, h_m);
    const IndexRange cols = block_range(cell % w_m + 1, w_s, w_m);
    for (int r = rows.first; r <= rows.last; ++r) {
      for (int c = cols.first; c <= cols.last; ++c) {
        out.values[static_cast<std::size_t>((r - 1) * w_s + (c - 1))] = 0;
      }
    }
  }
  return out;
}

}  // namespace

BinaryMask f2_generate(const BaseWeightMask& base, int h_s, int w_s, int k) {
  const int cells = base.h * base.w;
  if (k < 1 || k > cells || base.values.size() != static_cast<std::size_t>(cells)) {
    throw std::invalid_argument("f2_generate: k must be in [1, " +
                                std::to_string(cells) + "]");
  }
  std::vector<int> order(static_cast<std::size_t>(cells));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&base](int a, int b) {
    return base.values[static_cast<std::size_t>(a)] <
           base.values[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(k));
  std::sort(order.begin(), order.end());
  return expand_cells(base.h, base.w, order, h_s, w_s);
}

std::vector<BinaryMask> enumerate_single_zero_masks(int h_m, int w_m) {
  if (h_m < 1 || w_m < 1) {
    throw std::invalid_argument("enumerate_single_zero_masks: extents must be >= 1");
  }
  std::vector<BinaryMask> masks;
  masks.reserve(static_cast<std::size_t>(h_m * w_m));
  for (int cell = 0; cell < h_m * w_m; ++cell) {
    BinaryMask m = BinaryMask::ones(h_m, w_m);
    m.values[static_cast<std::size_t>(cell)] = 0;
    m.zeroed_cells = {cell};
    masks.push_back(std::move(m));
  }
  return masks;
}

BinaryMask f1_expand(const BinaryMask& mask_m, int h_s, int w_s) {
  std::vector<int> cells;
  for (int i = 0; i < mask_m.h * mask_m.w; ++i) {
    if (mask_m.values[static_cast<std::size_t>(i)] == 0) cells.push_back(i);
  }
  return expand_cells(mask_m.h, mask_m.w, cells, h_s, w_s);
}

Tensor apply_mask(const Tensor& features, const BinaryMask& mask) {
  const std::size_t r = features.rank();
  if ((r != 3 && r != 4) || features.dim(r - 2) != static_cast<std::size_t>(mask.h) ||
      features.dim(r - 1) != static_cast<std::size_t>(mask.w)) {
    throw std::invalid_argument("apply_mask: features " +
                                shape_string(features.dims()) + " vs mask " +
                                std::to_string(mask.h) + "x" + std::to_string(mask.w));
  }
  Tensor out = features;
  const std::size_t plane = mask.values.size();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (mask.values[i % plane] == 0) out[i] = 0;
  }
  return out;
}

ReferenceMask select_reference_mask(const SampledFeatures& positive,
                                    const LogitsFn& classifier, int h_m,
                                    int w_m) {
  const std::vector<BinaryMask> candidates = enumerate_single_zero_masks(h_m, w_m);
  const auto h1 = static_cast<int>(positive.sbrf1.dim(1));
  const auto w1 = static_cast<int>(positive.sbrf1.dim(2));
  const auto h2 = static_cast<int>(positive.sbrf2.dim(1));
  const auto w2 = static_cast<int>(positive.sbrf2.dim(2));

  std::vector<Tensor> af1, af2;
  std::vector<BinaryMask> masks1, masks2;
  for (const BinaryMask& m : candidates) {
    masks1.push_back(f1_expand(m, h1, w1));
    masks2.push_back(f1_expand(m, h2, w2));
    af1.push_back(apply_mask(positive.sbrf1, masks1.back()));
    af2.push_back(apply_mask(positive.sbrf2, masks2.back()));
  }
  const Tensor logits = classifier(stack(af1), stack(af2));

  std::size_t best = 0;
  double best_loss = -1;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const int label = kPositiveClass;
    const Tensor row({1, 2}, {logits[2 * i], logits[2 * i + 1]});
    const double loss = cross_entropy_loss(row, std::span<const int>(&label, 1)).loss;
    if (loss > best_loss) {
      best_loss = loss;
      best = i;
    }
  }
  return {candidates[best], masks1[best], masks2[best], static_cast<int>(best),
          best_loss};
}

}  // namespace afsl
