// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_ADVERSARIAL_MASK_HPP_
#define AFSL_ADVERSARIAL_MASK_HPP_

#include <cstdint>
#include <functional>
#include <vector>

#include "afsl/feature_sampler.hpp"
#include "afsl/tensor.hpp"

namespace afsl {

/// Inclusive 1-based index range.
struct IndexRange {
  int first = 1;
  int last = 0;
  int size() const { return last - first + 1; }
  bool contains(int i) const { return i >= first && i <= last; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Rows (or columns) of an extent_s-sized map that belong to cell index_m
/// of an extent_m-sized base mask:
///   [floor((m-1) S/M + 1/2) + 1, floor(m S/M + 1/2)]
/// Requires 1 <= index_m <= extent_m <= extent_s.
IndexRange block_range(int index_m, int extent_s, int extent_m);

/// Real-valued generator output, row-major h x w.
struct BaseWeightMask {
  int h = 0;
  int w = 0;
  std::vector<double> values;

  double at(int row, int col) const {
    return values[static_cast<std::size_t>(row * w + col)];
  }
};

/// {0,1} mask, row-major h x w. `zeroed_cells` lists the base-mask cells
/// (row-major, 0-based) whose blocks were cleared.
struct BinaryMask {
  int h = 0;
  int w = 0;
  std::vector<std::uint8_t> values;
  std::vector<int> zeroed_cells;

  static BinaryMask ones(int h, int w);
  std::uint8_t at(int row, int col) const {
    return values[static_cast<std::size_t>(row * w + col)];
  }
  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

/// Zeroes the blocks of the k lowest-valued base cells (ties: lowest
/// row-major index) in an h_s x w_s mask.
BinaryMask f2_generate(const BaseWeightMask& base, int h_s, int w_s, int k);

/// The h_m * w_m masks that are all ones except one zero, in row-major
/// order of the zero.
std::vector<BinaryMask> enumerate_single_zero_masks(int h_m, int w_m);

/// Expands a small binary grid to h_s x w_s by clearing the block of every
/// zero cell.
BinaryMask f1_expand(const BinaryMask& mask_m, int h_s, int w_s);

/// Broadcast product over channels. Accepts (C, H, W) or (N, C, H, W).
Tensor apply_mask(const Tensor& features, const BinaryMask& mask);

/// Maps a batch of (af1, af2) inputs, each with a leading batch axis, to
/// (N, 2) logits.
using LogitsFn = std::function<Tensor(const Tensor& af1, const Tensor& af2)>;

struct ReferenceMask {
  BinaryMask base;   // h_m x w_m single-zero grid (the regression target)
  BinaryMask mask1;  // expanded to the SBRF1 size
  BinaryMask mask2;  // expanded to the SBRF2 size
  int cell = 0;      // row-major index of the zero cell
  double loss = 0;   // positive-label loss under this mask
};

/// Scores every single-zero mask on one positive sample and returns the one
/// with the highest positive-label cross entropy (ties: lowest cell).
ReferenceMask select_reference_mask(const SampledFeatures& positive,
                                    const LogitsFn& classifier, int h_m,
                                    int w_m);

}  // namespace afsl

#endif  // AFSL_ADVERSARIAL_MASK_HPP_
