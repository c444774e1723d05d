// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace afsl {

std::size_t shape_size(const Shape& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& dims) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i) os << 'x';
    os << dims[i];
  }
  os << ']';
  return os.str();
}

namespace {

void check_dims(const Shape& dims) {
  if (dims.empty() || dims.size() > 4) {
    throw std::invalid_argument("tensor rank must be 1..4, got " +
                                shape_string(dims));
  }
  for (std::size_t d : dims) {
    if (d == 0) {
      throw std::invalid_argument("tensor extents must be positive, got " +
                                  shape_string(dims));
    }
  }
}

}  // namespace

Tensor::Tensor(Shape dims, Scalar fill) : dims_(std::move(dims)) {
  check_dims(dims_);
  data_.assign(shape_size(dims_), fill);
}

Tensor::Tensor(Shape dims, std::vector<Scalar> values)
    : dims_(std::move(dims)), data_(std::move(values)) {
  check_dims(dims_);
  if (data_.size() != shape_size(dims_)) {
    throw std::invalid_argument("tensor of shape " + shape_string(dims_) +
                                " needs " + std::to_string(shape_size(dims_)) +
                                " values, got " + std::to_string(data_.size()));
  }
}

std::size_t Tensor::dim(std::size_t axis) const {
  if (axis >= dims_.size()) {
    throw std::out_of_range("axis " + std::to_string(axis) +
                            " out of range for " + shape_string(dims_));
  }
  return dims_[axis];
}

Scalar& Tensor::at(std::size_t c, std::size_t h, std::size_t w) {
  return data_[(c * dims_[1] + h) * dims_[2] + w];
}

Scalar Tensor::at(std::size_t c, std::size_t h, std::size_t w) const {
  return data_[(c * dims_[1] + h) * dims_[2] + w];
}

Scalar& Tensor::at(std::size_t n, std::size_t c, std::size_t h,
                   std::size_t w) {
  return data_[((n * dims_[1] + c) * dims_[2] + h) * dims_[3] + w];
}

Scalar Tensor::at(std::size_t n, std::size_t c, std::size_t h,
                  std::size_t w) const {
  return data_[((n * dims_[1] + c) * dims_[2] + h) * dims_[3] + w];
}

Tensor Tensor::reshaped(Shape dims) const& {
  Tensor copy = *this;
  return std::move(copy).reshaped(std::move(dims));
}

Tensor Tensor::reshaped(Shape dims) && {
  check_dims(dims);
  if (shape_size(dims) != data_.size()) {
    throw std::invalid_argument("cannot reshape " + shape_string(dims_) +
                                " to " + shape_string(dims));
  }
  dims_ = std::move(dims);
  return std::move(*this);
}

Tensor Tensor::slice(std::size_t index) const {
  if (dims_.size() < 2 || index >= dims_[0]) {
    throw std::out_of_range("slice " + std::to_string(index) + " of " +
                            shape_string(dims_));
  }
  Shape item_dims(dims_.begin() + 1, dims_.end());
  const std::size_t n = shape_size(item_dims);
  std::vector<Scalar> values(data_.begin() + static_cast<std::ptrdiff_t>(index * n),
                             data_.begin() + static_cast<std::ptrdiff_t>((index + 1) * n));
  return Tensor(std::move(item_dims), std::move(values));
}

void Tensor::set_slice(std::size_t index, const Tensor& item) {
  if (dims_.size() < 2 || index >= dims_[0] ||
      item.dims() != Shape(dims_.begin() + 1, dims_.end())) {
    throw std::invalid_argument("cannot write " + shape_string(item.dims()) +
                                " into slot " + std::to_string(index) + " of " +
                                shape_string(dims_));
  }
  std::copy(item.data_.begin(), item.data_.end(),
            data_.begin() + static_cast<std::ptrdiff_t>(index * item.size()));
}

void Tensor::fill(Scalar value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](Scalar v) { return std::isfinite(v); });
}

Tensor stack(std::span<const Tensor> items) {
  if (items.empty()) throw std::invalid_argument("stack of zero tensors");
  const Shape& item_dims = items.front().dims();
  if (item_dims.size() >= 4) {
    throw std::invalid_argument("stack would exceed rank 4 for " +
                                shape_string(item_dims));
  }
  Shape dims{items.size()};
  dims.insert(dims.end(), item_dims.begin(), item_dims.end());
  Tensor out(dims);
  for (std::size_t i = 0; i < items.size(); ++i) out.set_slice(i, items[i]);
  return out;
}

Scalar dot(const Tensor& a, const Tensor& b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot of " + shape_string(a.dims()) + " and " +
                                shape_string(b.dims()));
  }
  Scalar sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

Scalar max_abs_diff(const Tensor& a, const Tensor& b) {
  if (a.dims() != b.dims()) {
    throw std::invalid_argument("max_abs_diff of " + shape_string(a.dims()) +
                                " and " + shape_string(b.dims()));
  }
  Scalar m = 0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace afsl
