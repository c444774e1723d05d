// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_TENSOR_HPP_
#define AFSL_TENSOR_HPP_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace afsl {

using Scalar = double;
using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& dims);
std::string shape_string(const Shape& dims);

/// Dense row-major array of up to four axes. Axes are read as
/// (batch, channel, height, width) by the layer ops; images and single
/// feature maps use three axes (channel, height, width).
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape dims, Scalar fill = 0);
  Tensor(Shape dims, std::vector<Scalar> values);

  const Shape& dims() const noexcept { return dims_; }
  std::size_t rank() const noexcept { return dims_.size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  Scalar* data() noexcept { return data_.data(); }
  const Scalar* data() const noexcept { return data_.data(); }
  std::span<Scalar> values() noexcept { return data_; }
  std::span<const Scalar> values() const noexcept { return data_; }

  Scalar& operator[](std::size_t i) { return data_[i]; }
  Scalar operator[](std::size_t i) const { return data_[i]; }

  // Rank-3 (c, h, w) and rank-4 (n, c, h, w) element access, 0-based.
  Scalar& at(std::size_t c, std::size_t h, std::size_t w);
  Scalar at(std::size_t c, std::size_t h, std::size_t w) const;
  Scalar& at(std::size_t n, std::size_t c, std::size_t h, std::size_t w);
  Scalar at(std::size_t n, std::size_t c, std::size_t h, std::size_t w) const;

  Tensor reshaped(Shape dims) const&;
  Tensor reshaped(Shape dims) &&;

  /// Copies item `index` along axis 0 into a tensor of the remaining axes.
  Tensor slice(std::size_t index) const;
  /// Overwrites item `index` along axis 0 with `item` (whose shape must
  /// equal dims()[1:]).
  void set_slice(std::size_t index, const Tensor& item);

  void fill(Scalar value);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape dims_;
  std::vector<Scalar> data_;
};

/// Stacks equally-shaped tensors along a new leading axis.
Tensor stack(std::span<const Tensor> items);

Scalar dot(const Tensor& a, const Tensor& b);
Scalar max_abs_diff(const Tensor& a, const Tensor& b);

}  // namespace afsl

#endif  // AFSL_TENSOR_HPP_
