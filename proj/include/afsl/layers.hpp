// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_LAYERS_HPP_
#define AFSL_LAYERS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "afsl/tensor.hpp"

namespace afsl {

/// Weights and biases of one layer together with their momentum buffers.
///
/// Convolution weights are (out, in, k, k); fully-connected weights are
/// (out, in). Biases are (out). A frozen group is never touched by the
/// optimizer.
struct LayerParams {
  Tensor weights;
  Tensor biases;
  Tensor weight_momentum;
  Tensor bias_momentum;
  bool frozen = false;

  LayerParams() = default;
  LayerParams(Tensor w, Tensor b);
};

struct LayerGrads {
  Tensor weights;
  Tensor biases;
};

struct OptimizerSpec {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0005;

  /// Throws std::invalid_argument unless lr > 0, momentum in [0,1),
  /// weight_decay >= 0 and all are finite.
  void validate() const;
};

// ---- convolution -------------------------------------------------------

/// Cross-correlation of an (N, C, H, W) input with (O, C, k, k) weights.
Tensor conv2d(const Tensor& input, const LayerParams& params, int stride,
              int padding);

struct Conv2dGrads {
  Tensor input;
  LayerGrads params;
};

Conv2dGrads conv2d_backward(const Tensor& input, const LayerParams& params,
                            int stride, int padding, const Tensor& grad_output);

// ---- 2x2 / stride 2 max pooling ---------------------------------------

struct PoolResult {
  Tensor output;
  /// Flat input index of the selected element for each output element.
  std::vector<std::size_t> argmax;
};

PoolResult maxpool2d(const Tensor& input);
Tensor maxpool2d_backward(const Shape& input_dims,
                          std::span<const std::size_t> argmax,
                          const Tensor& grad_output);

// ---- fully connected ----------------------------------------------------

/// y = W x + b for every row of `input`. Rank-1 input is a single sample;
/// higher ranks are flattened to (N, rest).
Tensor fully_connected(const Tensor& input, const LayerParams& params);

struct FcGrads {
  Tensor input;  // same dims as the forward input
  LayerGrads params;
};

FcGrads fully_connected_backward(const Tensor& input, const LayerParams& params,
                                 const Tensor& grad_output);

// ---- activations and loss ---------------------------------------------

Tensor relu(const Tensor& input);
/// Passes the gradient where input > 0 (zero at exactly 0).
Tensor relu_backward(const Tensor& input, const Tensor& grad_output);

Tensor sigmoid(const Tensor& input);

/// Row-wise softmax of an (N, K) tensor.
Tensor softmax(const Tensor& logits);

/// Class indices used by the two-class loss; they follow the 1-based
/// numbering of the classes in the cross-entropy sum.
inline constexpr int kNegativeClass = 1;
inline constexpr int kPositiveClass = 2;

struct LossResult {
  double loss = 0;
  Tensor grad_logits;
};

/// Mean cross entropy over an (N, 2) batch. Labels are 1 or 2.
LossResult cross_entropy_loss(const Tensor& logits, std::span<const int> labels);

// ---- optimizer ----------------------------------------------------------

/// One SGD step with momentum and L2 weight decay:
///   v <- momentum * v + (g + weight_decay * w);  w <- w - lr * v
/// Returns false (and leaves everything untouched) for a frozen group.
bool sgd_step(LayerParams& params, const LayerGrads& grads,
              const OptimizerSpec& spec);

}  // namespace afsl

#endif  // AFSL_LAYERS_HPP_
