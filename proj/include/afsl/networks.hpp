// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_NETWORKS_HPP_
#define AFSL_NETWORKS_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "afsl/adversarial_mask.hpp"
#include "afsl/feature_sampler.hpp"
#include "afsl/geometry.hpp"
#include "afsl/layers.hpp"
#include "afsl/tensor.hpp"

namespace afsl {

struct NamedTensor {
  std::string name;
  Tensor value;
};

// ---- backbone -----------------------------------------------------------

struct BackboneConfig {
  int in_channels = 3;
  int width = 32;
};

/// Five groups of (3x3 conv, ReLU). Pooling after groups 1-3 puts the
/// group-4 output (level 1) at stride 8; pooling after group 4 puts the
/// group-5 output (level 2) at stride 16. Groups 1-3 are always frozen.
class Backbone {
 public:
  static constexpr int kGroups = 5;

  Backbone() = default;
  Backbone(const BackboneConfig& config, std::uint64_t seed);

  /// `patch` is (C, H, W) with H, W >= 16; it is zero-padded on the
  /// bottom/right up to a multiple of 16.
  FeaturePair forward(const Tensor& patch) const;

  /// Intermediate values kept for the group-4/5 backward pass.
  struct Trace {
    Tensor g4_input;
    Tensor g4_pre;
    Tensor g4_out;
    PoolResult pool4;
    Tensor g5_pre;
  };
  FeaturePair forward(const Tensor& patch, Trace& trace) const;

  /// Gradients of groups 4 and 5 given gradients on the two taps
  /// (each (C, H, W) like the corresponding level).
  std::array<LayerGrads, 2> backward_upper(const Trace& trace,
                                           const Tensor& grad_level1,
                                           const Tensor& grad_level2) const;

  static std::size_t padded_extent(std::size_t extent);

  const BackboneConfig& config() const { return config_; }
  std::array<LayerParams, kGroups>& groups() { return groups_; }
  const std::array<LayerParams, kGroups>& groups() const { return groups_; }

  /// Number of forward passes run so far (instrumentation).
  std::uint64_t forward_count() const { return forward_count_; }
  void reset_forward_count() { forward_count_ = 0; }

  std::vector<NamedTensor> parameters() const;
  void load_parameters(std::span<const NamedTensor> params);

 private:
  Tensor pad_input(const Tensor& patch) const;

  BackboneConfig config_;
  std::array<LayerParams, kGroups> groups_;
  mutable std::uint64_t forward_count_ = 0;
};

// ---- classifier D -------------------------------------------------------

struct ClassifierConfig {
  int fc1_width = 256;  // FC1-1 and FC1-2 each
  int fc2_width = 512;
};

/// Two parallel FC layers over the flattened AF1 / AF2 inputs, concatenated
/// into FC2, then a two-way output. ReLU after every hidden layer.
class ClassifierD {
 public:
  ClassifierD() = default;
  ClassifierD(std::size_t af1_size, std::size_t af2_size,
              const ClassifierConfig& config, std::uint64_t seed);

  struct Cache {
    Tensor af1, af2;          // (N, af1_size), (N, af2_size)
    Tensor h1_pre, h2_pre;    // FC1-1 / FC1-2 before ReLU
    Tensor concat;            // (N, 2 * fc1_width) after ReLU
    Tensor fc2_pre, fc2_out;  // FC2 before/after ReLU
  };

  struct Grads {
    LayerGrads fc1_1, fc1_2, fc2, out;
    Tensor af1, af2;  // flattened (N, size)
  };

  /// Inputs carry a leading batch axis, or are a single sample of the
  /// configured shape; returns (N, 2) logits.
  Tensor forward(const Tensor& af1, const Tensor& af2) const;
  Tensor forward(const Tensor& af1, const Tensor& af2, Cache& cache) const;
  Grads backward(const Cache& cache, const Tensor& grad_logits) const;
  void apply(const Grads& grads, const OptimizerSpec& spec);

  /// Probability of the positive class per row.
  std::vector<double> positive_scores(const Tensor& af1, const Tensor& af2) const;

  LogitsFn as_logits_fn() const;

  std::size_t af1_size() const { return af1_size_; }
  std::size_t af2_size() const { return af2_size_; }

  LayerParams fc1_1, fc1_2, fc2, out;

  std::vector<NamedTensor> parameters() const;
  void load_parameters(std::span<const NamedTensor> params);

 private:
  std::size_t batch_of(const Tensor& af1, const Tensor& af2) const;

  std::size_t af1_size_ = 0;
  std::size_t af2_size_ = 0;
};

// ---- generator G --------------------------------------------------------

struct GeneratorConfig {
  int hidden = 256;  // C6 output channels
};

/// 2x2/2 max pool over SBRF1, 1x1 conv to `hidden` channels with ReLU, 1x1
/// conv to one channel, sigmoid.
class GeneratorG {
 public:
  GeneratorG() = default;
  GeneratorG(std::size_t in_channels, const GeneratorConfig& config,
             std::uint64_t seed);

  struct Cache {
    Shape input_dims;
    PoolResult pool;
    Tensor c6_pre, c6_out;
    Tensor output;  // (N, 1, h/2, w/2) after sigmoid
  };

  struct Grads {
    LayerGrads c6, out_conv;
    Tensor input;
  };

  /// (N, C, H, W) -> (N, 1, H/2, W/2) in (0, 1). A (C, H, W) input is a
  /// batch of one.
  Tensor forward(const Tensor& sbrf1) const;
  Tensor forward(const Tensor& sbrf1, Cache& cache) const;
  /// `grad_output` is with respect to the sigmoid output.
  Grads backward(const Cache& cache, const Tensor& grad_output) const;
  void apply(const Grads& grads, const OptimizerSpec& spec);

  BaseWeightMask base_mask(const Tensor& sbrf1_single) const;

  LayerParams c6, out_conv;

  std::vector<NamedTensor> parameters() const;
  void load_parameters(std::span<const NamedTensor> params);
};

// ---- training steps -----------------------------------------------------

/// Samples with a leading batch axis and 1/2 class labels.
struct TrainingBatch {
  Tensor sbrf1;
  Tensor sbrf2;
  std::vector<int> labels;
};

struct DStepOptions {
  int k_drop = 1;
  bool use_generator = true;  // false: positives pass unmasked
  int base_h = 3;
  int base_w = 3;
};

/// Builds the adversarial inputs AF1/AF2: each positive is masked by f2 of
/// its own generator output, negatives pass unchanged.
std::pair<Tensor, Tensor> adversarial_inputs(const GeneratorG& generator,
                                             const TrainingBatch& batch,
                                             const DStepOptions& options);

struct DLossResult {
  double loss = 0;
  ClassifierD::Grads grads;
};

/// Loss and gradients of one D step without updating anything.
DLossResult d_step_loss(const ClassifierD& classifier,
                        const GeneratorG& generator, const TrainingBatch& batch,
                        const DStepOptions& options);

/// One SGD step of D on the adversarially masked batch; returns the loss
/// before the update.
double train_D_step(ClassifierD& classifier, const GeneratorG& generator,
                    const TrainingBatch& batch, const OptimizerSpec& spec,
                    const DStepOptions& options);

struct GStepResult {
  double loss = 0;  // lambda * mean ||G(C1) - M||^2 before the update
  std::vector<ReferenceMask> references;
};

/// Picks the reference mask of each positive against the current D and
/// regresses G toward it with one SGD step. D is untouched. lambda == 0
/// leaves G unchanged.
GStepResult train_G_step(GeneratorG& generator, const ClassifierD& classifier,
                         const SampledBatch& positives, const OptimizerSpec& spec,
                         double lambda);

/// lambda * mean ||G(C1) - M||^2 for fixed targets, with gradients.
double g_regression_loss(const GeneratorG& generator, const Tensor& sbrf1,
                         std::span<const BinaryMask> targets, double lambda,
                         GeneratorG::Grads* grads);

// ---- per-candidate raw-image baseline ------------------------------------

/// Scores image-space candidates the classic way: every box is cropped,
/// resized to L x L and pushed through the full backbone and then the head,
/// whose inputs are sampled over the whole crop. Returns the
/// positive-class probability per candidate.
std::vector<double> raw_baseline_forward(std::span<const BBox> candidates,
                                         const Tensor& frame,
                                         const Backbone& backbone,
                                         const ClassifierD& classifier,
                                         const SamplerConfig& sampler, int L);

// ---- analytic FLOP model ------------------------------------------------

/// Multiply and add counted as two operations; bias adds, ReLU and pooling
/// comparisons counted as one per element.
double backbone_flops(const BackboneConfig& config, int patch_h, int patch_w);
double head_flops(std::size_t af1_size, std::size_t af2_size,
                  const ClassifierConfig& config);
double sbr_flops(std::size_t channels1, std::size_t points1,
                 std::size_t channels2, std::size_t points2);

}  // namespace afsl

#endif  // AFSL_NETWORKS_HPP_
