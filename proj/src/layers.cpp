// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/layers.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>

namespace afsl {

namespace {

using RowMatrix =
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;
using ConstVectorMap = Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>>;

[[noreturn]] void shape_error(const std::string& op, const Shape& a,
                              const Shape& b) {
  throw std::invalid_argument(op + ": incompatible shapes " + shape_string(a) +
                              " and " + shape_string(b));
}

struct ConvGeometry {
  std::size_t n, c, h, w, o, k, out_h, out_w;
};

ConvGeometry conv_geometry(const Tensor& input, const LayerParams& params,
                           int stride, int padding) {
  const Tensor& wt = params.weights;
  if (input.rank() != 4 || wt.rank() != 4 || wt.dim(2) != wt.dim(3) ||
      input.dim(1) != wt.dim(1)) {
    shape_error("conv2d", input.dims(), wt.dims());
  }
  if (params.biases.size() != wt.dim(0)) {
    shape_error("conv2d bias", params.biases.dims(), wt.dims());
  }
  if (stride < 1 || padding < 0) {
    throw std::invalid_argument("conv2d: stride must be >= 1 and padding >= 0");
  }
  ConvGeometry g{input.dim(0), input.dim(1), input.dim(2), input.dim(3),
                 wt.dim(0),    wt.dim(2),    0,            0};
  const long span_h = static_cast<long>(g.h) + 2 * padding - static_cast<long>(g.k);
  const long span_w = static_cast<long>(g.w) + 2 * padding - static_cast<long>(g.k);
  if (span_h < 0 || span_w < 0) {
    shape_error("conv2d (output would be empty)", input.dims(), wt.dims());
  }
  g.out_h = static_cast<std::size_t>(span_h / stride + 1);
  g.out_w = static_cast<std::size_t>(span_w / stride + 1);
  return g;
}

// Unfolds image `n` of `input` into a (C*k*k, out_h*out_w) row-major matrix.
void im2col(const Tensor& input, std::size_t n, const ConvGeometry& g,
            int stride, int padding, RowMatrix& col) {
  col.resize(static_cast<Eigen::Index>(g.c * g.k * g.k),
             static_cast<Eigen::Index>(g.out_h * g.out_w));
  const Scalar* src = input.data() + n * g.c * g.h * g.w;
  Scalar* dst = col.data();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy) * stride - padding + static_cast<long>(ky);
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox) * stride - padding + static_cast<long>(kx);
            *dst++ = (iy < 0 || ix < 0 || iy >= static_cast<long>(g.h) ||
                      ix >= static_cast<long>(g.w))
                         ? Scalar{0}
                         : src[(c * g.h + static_cast<std::size_t>(iy)) * g.w +
                               static_cast<std::size_t>(ix)];
          }
        }
      }
    }
  }
}

void col2im(const RowMatrix& col, std::size_t n, const ConvGeometry& g,
            int stride, int padding, Tensor& grad_input) {
  Scalar* dst = grad_input.data() + n * g.c * g.h * g.w;
  const Scalar* src = col.data();
  for (std::size_t c = 0; c < g.c; ++c) {
    for (std::size_t ky = 0; ky < g.k; ++ky) {
      for (std::size_t kx = 0; kx < g.k; ++kx) {
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy) * stride - padding + static_cast<long>(ky);
          for (std::size_t ox = 0; ox < g.out_w; ++ox, ++src) {
            const long ix = static_cast<long>(ox) * stride - padding + static_cast<long>(kx);
            if (iy < 0 || ix < 0 || iy >= static_cast<long>(g.h) ||
                ix >= static_cast<long>(g.w)) {
              continue;
            }
            dst[(c * g.h + static_cast<std::size_t>(iy)) * g.w +
                static_cast<std::size_t>(ix)] += *src;
          }
        }
      }
    }
  }
}

std::size_t flat_rows(const Tensor& input) {
  return input.rank() == 1 ? 1 : input.dim(0);
}

}  // namespace

LayerParams::LayerParams(Tensor w, Tensor b)
    : weights(std::move(w)),
      biases(std::move(b)),
      weight_momentum(weights.dims()),
      bias_momentum(biases.dims()) {}

void OptimizerSpec::validate() const {
  if (!std::isfinite(learning_rate) || !std::isfinite(momentum) ||
      !std::isfinite(weight_decay) || learning_rate <= 0 || momentum < 0 ||
      momentum >= 1 || weight_decay < 0) {
    throw std::invalid_argument(
        "optimizer spec needs lr > 0, momentum in [0,1), weight_decay >= 0");
  }
}

Tensor conv2d(const Tensor& input, const LayerParams& params, int stride,
              int padding) {
  const ConvGeometry g = conv_geometry(input, params, stride, padding);
  Tensor out({g.n, g.o, g.out_h, g.out_w});
  const auto hw = static_cast<Eigen::Index>(g.out_h * g.out_w);
  ConstMatrixMap wt(params.weights.data(), static_cast<Eigen::Index>(g.o),
                    static_cast<Eigen::Index>(g.c * g.k * g.k));
  ConstVectorMap bias(params.biases.data(), static_cast<Eigen::Index>(g.o));
  RowMatrix col;
  for (std::size_t n = 0; n < g.n; ++n) {
    MatrixMap out_n(out.data() + n * g.o * g.out_h * g.out_w,
                    static_cast<Eigen::Index>(g.o), hw);
    if (g.k == 1 && stride == 1 && padding == 0) {
      ConstMatrixMap in_n(input.data() + n * g.c * g.h * g.w,
                          static_cast<Eigen::Index>(g.c), hw);
      out_n.noalias() = wt * in_n;
    } else {
      im2col(input, n, g, stride, padding, col);
      out_n.noalias() = wt * col;
    }
    out_n.colwise() += bias;
  }
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const LayerParams& params,
                            int stride, int padding, const Tensor& grad_output) {
  const ConvGeometry g = conv_geometry(input, params, stride, padding);
  const Shape expected{g.n, g.o, g.out_h, g.out_w};
  if (grad_output.dims() != expected) {
    shape_error("conv2d_backward", grad_output.dims(), expected);
  }
  Conv2dGrads grads{Tensor(input.dims()),
                    {Tensor(params.weights.dims()), Tensor(params.biases.dims())}};
  const auto hw = static_cast<Eigen::Index>(g.out_h * g.out_w);
  const auto ckk = static_cast<Eigen::Index>(g.c * g.k * g.k);
  ConstMatrixMap wt(params.weights.data(), static_cast<Eigen::Index>(g.o), ckk);
  MatrixMap grad_w(grads.params.weights.data(), static_cast<Eigen::Index>(g.o), ckk);
  Eigen::Map<Eigen::Matrix<Scalar, Eigen::Dynamic, 1>> grad_b(
      grads.params.biases.data(), static_cast<Eigen::Index>(g.o));
  RowMatrix col;
  RowMatrix grad_col;
  for (std::size_t n = 0; n < g.n; ++n) {
    ConstMatrixMap gout(grad_output.data() + n * g.o * g.out_h * g.out_w,
                        static_cast<Eigen::Index>(g.o), hw);
    // Plain loop: Eigen's vectorised reductions reorder sums by alignment.
    for (Eigen::Index o = 0; o < gout.rows(); ++o) {
      Scalar acc = 0;
      for (Eigen::Index j = 0; j < hw; ++j) acc += gout(o, j);
      grad_b(o) += acc;
    }
    if (g.k == 1 && stride == 1 && padding == 0) {
      ConstMatrixMap in_n(input.data() + n * g.c * g.h * g.w,
                          static_cast<Eigen::Index>(g.c), hw);
      grad_w.noalias() += gout * in_n.transpose();
      MatrixMap gin(grads.input.data() + n * g.c * g.h * g.w,
                    static_cast<Eigen::Index>(g.c), hw);
      gin.noalias() = wt.transpose() * gout;
    } else {
      im2col(input, n, g, stride, padding, col);
      grad_w.noalias() += gout * col.transpose();
      grad_col.noalias() = wt.transpose() * gout;
      col2im(grad_col, n, g, stride, padding, grads.input);
    }
  }
  return grads;
}

PoolResult maxpool2d(const Tensor& input) {
  if (input.rank() != 4) {
    throw std::invalid_argument("maxpool2d expects (N,C,H,W), got " +
                                shape_string(input.dims()));
  }
  const std::size_t nc = input.dim(0) * input.dim(1);
  const std::size_t h = input.dim(2), w = input.dim(3);
  if (h % 2 || w % 2) {
    throw std::invalid_argument("maxpool2d needs even spatial extents, got " +
                                shape_string(input.dims()));
  }
  const std::size_t oh = h / 2, ow = w / 2;
  PoolResult result{Tensor({input.dim(0), input.dim(1), oh, ow}), {}};
  result.argmax.resize(result.output.size());
  std::size_t o = 0;
  for (std::size_t p = 0; p < nc; ++p) {
    const std::size_t base = p * h * w;
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox, ++o) {
        std::size_t best = base + (2 * oy) * w + 2 * ox;
        // Row-major scan with strict '>' keeps the first maximum.
        for (std::size_t dy = 0; dy < 2; ++dy) {
          for (std::size_t dx = 0; dx < 2; ++dx) {
            const std::size_t idx = base + (2 * oy + dy) * w + 2 * ox + dx;
            if (input[idx] > input[best]) best = idx;
          }
        }
        result.output[o] = input[best];
        result.argmax[o] = best;
      }
    }
  }
  return result;
}

Tensor maxpool2d_backward(const Shape& input_dims,
                          std::span<const std::size_t> argmax,
                          const Tensor& grad_output) {
  if (argmax.size() != grad_output.size()) {
    throw std::invalid_argument("maxpool2d_backward: argmax/gradient size mismatch");
  }
  Tensor grad(input_dims);
  for (std::size_t i = 0; i < argmax.size(); ++i) grad[argmax[i]] += grad_output[i];
  return grad;
}

Tensor fully_connected(const Tensor& input, const LayerParams& params) {
  const Tensor& wt = params.weights;
  const std::size_t rows = flat_rows(input);
  const std::size_t in = input.size() / rows;
  if (wt.rank() != 2 || wt.dim(1) != in || params.biases.size() != wt.dim(0)) {
    shape_error("fully_connected", input.dims(), wt.dims());
  }
  const std::size_t out_dim = wt.dim(0);
  Tensor out({rows, out_dim});
  ConstMatrixMap x(input.data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(in));
  ConstMatrixMap w(wt.data(), static_cast<Eigen::Index>(out_dim),
                   static_cast<Eigen::Index>(in));
  MatrixMap y(out.data(), static_cast<Eigen::Index>(rows),
              static_cast<Eigen::Index>(out_dim));
  y.noalias() = x * w.transpose();
  y.rowwise() += ConstVectorMap(params.biases.data(),
                                static_cast<Eigen::Index>(out_dim))
                     .transpose();
  return out;
}

FcGrads fully_connected_backward(const Tensor& input, const LayerParams& params,
                                 const Tensor& grad_output) {
  const Tensor& wt = params.weights;
  const std::size_t rows = flat_rows(input);
  const std::size_t in = input.size() / rows;
  if (wt.rank() != 2 || wt.dim(1) != in) {
    shape_error("fully_connected_backward", input.dims(), wt.dims());
  }
  const std::size_t out_dim = wt.dim(0);
  if (grad_output.size() != rows * out_dim) {
    shape_error("fully_connected_backward", grad_output.dims(),
                Shape{rows, out_dim});
  }
  FcGrads grads{Tensor(input.dims()), {Tensor(wt.dims()), Tensor(params.biases.dims())}};
  ConstMatrixMap x(input.data(), static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(in));
  ConstMatrixMap w(wt.data(), static_cast<Eigen::Index>(out_dim),
                   static_cast<Eigen::Index>(in));
  ConstMatrixMap gy(grad_output.data(), static_cast<Eigen::Index>(rows),
                    static_cast<Eigen::Index>(out_dim));
  MatrixMap(grads.input.data(), static_cast<Eigen::Index>(rows),
            static_cast<Eigen::Index>(in))
      .noalias() = gy * w;
  MatrixMap(grads.params.weights.data(), static_cast<Eigen::Index>(out_dim),
            static_cast<Eigen::Index>(in))
      .noalias() = gy.transpose() * x;
  for (std::size_t o = 0; o < out_dim; ++o) {
    Scalar acc = 0;
    for (std::size_t r = 0; r < rows; ++r) acc += grad_output[r * out_dim + o];
    grads.params.biases[o] = acc;
  }
  return grads;
}

Tensor relu(const Tensor& input) {
  Tensor out = input;
  for (Scalar& v : out.values()) v = v > 0 ? v : Scalar{0};
  return out;
}

Tensor relu_backward(const Tensor& input, const Tensor& grad_output) {
  if (input.dims() != grad_output.dims()) {
    shape_error("relu_backward", input.dims(), grad_output.dims());
  }
  Tensor grad = grad_output;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!(input[i] > 0)) grad[i] = 0;
  }
  return grad;
}

Tensor sigmoid(const Tensor& input) {
  Tensor out = input;
  for (Scalar& v : out.values()) {
    // Branches keep exp() from overflowing for large |v|.
    v = v >= 0 ? 1 / (1 + std::exp(-v)) : std::exp(v) / (1 + std::exp(v));
  }
  return out;
}

Tensor softmax(const Tensor& logits) {
  if (logits.rank() != 2) {
    throw std::invalid_argument("softmax expects (N,K), got " +
                                shape_string(logits.dims()));
  }
  Tensor out = logits;
  const std::size_t k = logits.dim(1);
  for (std::size_t n = 0; n < logits.dim(0); ++n) {
    Scalar* row = out.data() + n * k;
    const Scalar m = *std::max_element(row, row + k);
    Scalar sum = 0;
    for (std::size_t i = 0; i < k; ++i) sum += (row[i] = std::exp(row[i] - m));
    for (std::size_t i = 0; i < k; ++i) row[i] /= sum;
  }
  return out;
}

LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("cross_entropy_loss: empty batch");
  if (logits.rank() != 2 || logits.dim(1) != 2 || logits.dim(0) != labels.size()) {
    shape_error("cross_entropy_loss", logits.dims(), Shape{labels.size(), 2});
  }
  const std::size_t n = labels.size();
  LossResult result{0, softmax(logits)};
  const Scalar inv_n = Scalar{1} / static_cast<Scalar>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int label = labels[i];
    if (label != kNegativeClass && label != kPositiveClass) {
      throw std::invalid_argument("cross_entropy_loss: label must be 1 or 2, got " +
                                  std::to_string(label));
    }
    const std::size_t y = static_cast<std::size_t>(label - 1);
    const Scalar* a = logits.data() + 2 * i;
    // softplus(a_other - a_y); log1p keeps tiny losses distinct
    const Scalar d = a[1 - y] - a[y];
    const Scalar per_sample = d > 0 ? d + std::log1p(std::exp(-d)) : std::log1p(std::exp(d));
    result.loss += per_sample * inv_n;
    Scalar* g = result.grad_logits.data() + 2 * i;
    g[y] -= 1;
    g[0] *= inv_n;
    g[1] *= inv_n;
  }
  return result;
}

bool sgd_step(LayerParams& params, const LayerGrads& grads,
              const OptimizerSpec& spec) {
  spec.validate();
  if (grads.weights.dims() != params.weights.dims() ||
      grads.biases.dims() != params.biases.dims()) {
    shape_error("sgd_step", params.weights.dims(), grads.weights.dims());
  }
  if (params.frozen) {
    std::clog << "warning: sgd_step on a frozen parameter group ignored\n";
    return false;
  }
  auto update = [&spec](Tensor& w, Tensor& v, const Tensor& g) {
    for (std::size_t i = 0; i < w.size(); ++i) {
      v[i] = spec.momentum * v[i] + (g[i] + spec.weight_decay * w[i]);
      w[i] -= spec.learning_rate * v[i];
    }
  };
  update(params.weights, params.weight_momentum, grads.weights);
  update(params.biases, params.bias_momentum, grads.biases);
  return true;
}

}  // namespace afsl
