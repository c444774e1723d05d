// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/networks.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace afsl {

namespace {

Tensor random_normal(Shape dims, double stddev, std::mt19937_64& rng) {
  Tensor t(std::move(dims));
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Scalar& v : t.values()) v = stddev * normal(rng);
  return t;
}

LayerParams conv_layer(std::size_t out, std::size_t in, std::size_t k,
                       double stddev, std::mt19937_64& rng) {
  return {random_normal({out, in, k, k}, stddev, rng), Tensor({out})};
}

LayerParams fc_layer(std::size_t out, std::size_t in, double stddev,
                     std::mt19937_64& rng) {
  return {random_normal({out, in}, stddev, rng), Tensor({out})};
}

double he_std(std::size_t fan_in) { return std::sqrt(2.0 / static_cast<double>(fan_in)); }

void push_layer(std::vector<NamedTensor>& out, const std::string& prefix,
                const LayerParams& p) {
  out.push_back({prefix + ".weight", p.weights});
  out.push_back({prefix + ".bias", p.biases});
}

void load_layer(std::span<const NamedTensor> params, const std::string& prefix,
                LayerParams& p) {
  auto find = [&](const std::string& name) -> const Tensor& {
    for (const NamedTensor& t : params) {
      if (t.name == name) return t.value;
    }
    throw std::invalid_argument("checkpoint is missing parameter group '" + name + "'");
  };
  const Tensor& w = find(prefix + ".weight");
  const Tensor& b = find(prefix + ".bias");
  if (w.dims() != p.weights.dims() || b.dims() != p.biases.dims()) {
    throw std::invalid_argument("parameter group '" + prefix + "' has shape " +
                                shape_string(w.dims()) + ", expected " +
                                shape_string(p.weights.dims()));
  }
  p.weights = w;
  p.biases = b;
  p.weight_momentum.fill(0);
  p.bias_momentum.fill(0);
}

// Rank-3 tensors are treated as a batch of one.
Tensor as_batch(const Tensor& t) {
  if (t.rank() == 4) return t;
  if (t.rank() == 3) {
    Shape dims{1};
    dims.insert(dims.end(), t.dims().begin(), t.dims().end());
    return t.reshaped(dims);
  }
  throw std::invalid_argument("expected a (C,H,W) or (N,C,H,W) tensor, got " +
                              shape_string(t.dims()));
}

}  // namespace

// ---- Backbone -------------------------------------------------------------

Backbone::Backbone(const BackboneConfig& config, std::uint64_t seed)
    : config_(config) {
  if (config.in_channels < 1 || config.width < 1) {
    throw std::invalid_argument("backbone needs positive channel counts");
  }
  std::mt19937_64 rng(seed);
  const auto width = static_cast<std::size_t>(config.width);
  std::size_t in = static_cast<std::size_t>(config.in_channels);
  for (int g = 0; g < kGroups; ++g) {
    groups_[static_cast<std::size_t>(g)] = conv_layer(width, in, 3, he_std(in * 9), rng);
    in = width;
  }
  for (int g = 0; g < 3; ++g) groups_[static_cast<std::size_t>(g)].frozen = true;
}

std::size_t Backbone::padded_extent(std::size_t extent) {
  return std::max<std::size_t>(16, (extent + 15) / 16 * 16);
}

Tensor Backbone::pad_input(const Tensor& patch) const {
  if (patch.rank() != 3 ||
      patch.dim(0) != static_cast<std::size_t>(config_.in_channels)) {
    throw std::invalid_argument("backbone expects a (" +
                                std::to_string(config_.in_channels) +
                                ",H,W) patch, got " + shape_string(patch.dims()));
  }
  const std::size_t c = patch.dim(0), h = patch.dim(1), w = patch.dim(2);
  if (h < 16 || w < 16) {
    throw std::invalid_argument("backbone input " + shape_string(patch.dims()) +
                                " is smaller than 16x16");
  }
  const std::size_t ph = padded_extent(h), pw = padded_extent(w);
  Tensor x({1, c, ph, pw});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t y = 0; y < h; ++y) {
      std::copy_n(patch.data() + (ch * h + y) * w, w, x.data() + (ch * ph + y) * pw);
    }
  }
  return x;
}

FeaturePair Backbone::forward(const Tensor& patch) const {
  Trace trace;
  return forward(patch, trace);
}

FeaturePair Backbone::forward(const Tensor& patch, Trace& trace) const {
  Tensor x = pad_input(patch);
  ++forward_count_;
  for (std::size_t g = 0; g < 3; ++g) {
    x = maxpool2d(relu(conv2d(x, groups_[g], 1, 1))).output;
  }
  trace.g4_input = std::move(x);
  trace.g4_pre = conv2d(trace.g4_input, groups_[3], 1, 1);
  trace.g4_out = relu(trace.g4_pre);
  trace.pool4 = maxpool2d(trace.g4_out);
  trace.g5_pre = conv2d(trace.pool4.output, groups_[4], 1, 1);

  const Shape& d1 = trace.g4_out.dims();
  const Shape& d2 = trace.g5_pre.dims();
  FeaturePair out;
  out.level1 = trace.g4_out.reshaped({d1[1], d1[2], d1[3]});
  out.level2 = relu(trace.g5_pre).reshaped({d2[1], d2[2], d2[3]});
  return out;
}

std::array<LayerGrads, 2> Backbone::backward_upper(const Trace& trace,
                                                   const Tensor& grad_level1,
                                                   const Tensor& grad_level2) const {
  const Tensor g5_pre_grad =
      relu_backward(trace.g5_pre, grad_level2.reshaped(trace.g5_pre.dims()));
  Conv2dGrads g5 = conv2d_backward(trace.pool4.output, groups_[4], 1, 1, g5_pre_grad);
  Tensor g4_out_grad = maxpool2d_backward(trace.g4_out.dims(), trace.pool4.argmax, g5.input);
  const Tensor direct = grad_level1.reshaped(trace.g4_out.dims());
  for (std::size_t i = 0; i < g4_out_grad.size(); ++i) g4_out_grad[i] += direct[i];
  Conv2dGrads g4 = conv2d_backward(trace.g4_input, groups_[3], 1, 1,
                                   relu_backward(trace.g4_pre, g4_out_grad));
  return {std::move(g4.params), std::move(g5.params)};
}

std::vector<NamedTensor> Backbone::parameters() const {
  std::vector<NamedTensor> out;
  for (int g = 0; g < kGroups; ++g) {
    push_layer(out, "backbone.g" + std::to_string(g + 1), groups_[static_cast<std::size_t>(g)]);
  }
  return out;
}

void Backbone::load_parameters(std::span<const NamedTensor> params) {
  for (int g = 0; g < kGroups; ++g) {
    load_layer(params, "backbone.g" + std::to_string(g + 1), groups_[static_cast<std::size_t>(g)]);
  }
}

// ---- ClassifierD ------------------------------------------------------------

ClassifierD::ClassifierD(std::size_t af1_size, std::size_t af2_size,
                         const ClassifierConfig& config, std::uint64_t seed)
    : af1_size_(af1_size), af2_size_(af2_size) {
  if (af1_size == 0 || af2_size == 0 || config.fc1_width < 1 || config.fc2_width < 1) {
    throw std::invalid_argument("classifier needs positive layer sizes");
  }
  std::mt19937_64 rng(seed);
  const auto f1 = static_cast<std::size_t>(config.fc1_width);
  const auto f2 = static_cast<std::size_t>(config.fc2_width);
  fc1_1 = fc_layer(f1, af1_size, he_std(af1_size), rng);
  fc1_2 = fc_layer(f1, af2_size, he_std(af2_size), rng);
  fc2 = fc_layer(f2, 2 * f1, he_std(2 * f1), rng);
  out = fc_layer(2, f2, 0.01, rng);
}

std::size_t ClassifierD::batch_of(const Tensor& af1, const Tensor& af2) const {
  const bool ok = af1_size_ && af1.size() % af1_size_ == 0 &&
                  af2.size() % af2_size_ == 0 &&
                  af1.size() / af1_size_ == af2.size() / af2_size_ &&
                  af1.size() > 0;
  if (!ok) {
    throw std::invalid_argument("classifier inputs " + shape_string(af1.dims()) +
                                " and " + shape_string(af2.dims()) +
                                " do not match per-sample sizes " +
                                std::to_string(af1_size_) + " / " +
                                std::to_string(af2_size_));
  }
  return af1.size() / af1_size_;
}

Tensor ClassifierD::forward(const Tensor& af1, const Tensor& af2) const {
  Cache cache;
  return forward(af1, af2, cache);
}

Tensor ClassifierD::forward(const Tensor& af1, const Tensor& af2,
                            Cache& cache) const {
  const std::size_t n = batch_of(af1, af2);
  cache.af1 = af1.reshaped({n, af1_size_});
  cache.af2 = af2.reshaped({n, af2_size_});
  cache.h1_pre = fully_connected(cache.af1, fc1_1);
  cache.h2_pre = fully_connected(cache.af2, fc1_2);
  const std::size_t f1 = fc1_1.weights.dim(0);
  cache.concat = Tensor({n, 2 * f1});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f1; ++j) {
      cache.concat[i * 2 * f1 + j] = std::max(Scalar{0}, cache.h1_pre[i * f1 + j]);
      cache.concat[i * 2 * f1 + f1 + j] = std::max(Scalar{0}, cache.h2_pre[i * f1 + j]);
    }
  }
  cache.fc2_pre = fully_connected(cache.concat, fc2);
  cache.fc2_out = relu(cache.fc2_pre);
  return fully_connected(cache.fc2_out, out);
}

ClassifierD::Grads ClassifierD::backward(const Cache& cache,
                                         const Tensor& grad_logits) const {
  Grads g;
  FcGrads g_out = fully_connected_backward(cache.fc2_out, out, grad_logits);
  FcGrads g_fc2 = fully_connected_backward(
      cache.concat, fc2, relu_backward(cache.fc2_pre, g_out.input));
  const std::size_t n = cache.concat.dim(0);
  const std::size_t f1 = fc1_1.weights.dim(0);
  Tensor grad_h1({n, f1}), grad_h2({n, f1});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f1; ++j) {
      grad_h1[i * f1 + j] = g_fc2.input[i * 2 * f1 + j];
      grad_h2[i * f1 + j] = g_fc2.input[i * 2 * f1 + f1 + j];
    }
  }
  FcGrads g_11 = fully_connected_backward(cache.af1, fc1_1,
                                          relu_backward(cache.h1_pre, grad_h1));
  FcGrads g_12 = fully_connected_backward(cache.af2, fc1_2,
                                          relu_backward(cache.h2_pre, grad_h2));
  g.fc1_1 = std::move(g_11.params);
  g.fc1_2 = std::move(g_12.params);
  g.fc2 = std::move(g_fc2.params);
  g.out = std::move(g_out.params);
  g.af1 = std::move(g_11.input);
  g.af2 = std::move(g_12.input);
  return g;
}

void ClassifierD::apply(const Grads& grads, const OptimizerSpec& spec) {
  sgd_step(fc1_1, grads.fc1_1, spec);
  sgd_step(fc1_2, grads.fc1_2, spec);
  sgd_step(fc2, grads.fc2, spec);
  sgd_step(out, grads.out, spec);
}

std::vector<double> ClassifierD::positive_scores(const Tensor& af1,
                                                 const Tensor& af2) const {
  const Tensor probs = softmax(forward(af1, af2));
  std::vector<double> scores(probs.dim(0));
  for (std::size_t i = 0; i < scores.size(); ++i) {
    scores[i] = probs[2 * i + static_cast<std::size_t>(kPositiveClass - 1)];
  }
  return scores;
}

LogitsFn ClassifierD::as_logits_fn() const {
  return [this](const Tensor& af1, const Tensor& af2) { return forward(af1, af2); };
}

std::vector<NamedTensor> ClassifierD::parameters() const {
  std::vector<NamedTensor> outp;
  push_layer(outp, "d.fc1_1", fc1_1);
  push_layer(outp, "d.fc1_2", fc1_2);
  push_layer(outp, "d.fc2", fc2);
  push_layer(outp, "d.out", out);
  return outp;
}

void ClassifierD::load_parameters(std::span<const NamedTensor> params) {
  load_layer(params, "d.fc1_1", fc1_1);
  load_layer(params, "d.fc1_2", fc1_2);
  load_layer(params, "d.fc2", fc2);
  load_layer(params, "d.out", out);
}

// ---- GeneratorG ---------------------------------------------------------------

GeneratorG::GeneratorG(std::size_t in_channels, const GeneratorConfig& config,
                       std::uint64_t seed) {
  if (in_channels == 0 || config.hidden < 1) {
    throw std::invalid_argument("generator needs positive channel counts");
  }
  std::mt19937_64 rng(seed);
  const auto hidden = static_cast<std::size_t>(config.hidden);
  c6 = conv_layer(hidden, in_channels, 1, he_std(in_channels), rng);
  out_conv = conv_layer(1, hidden, 1, 0.01, rng);
}

Tensor GeneratorG::forward(const Tensor& sbrf1) const {
  Cache cache;
  return forward(sbrf1, cache);
}

Tensor GeneratorG::forward(const Tensor& sbrf1, Cache& cache) const {
  const Tensor x = as_batch(sbrf1);
  cache.input_dims = x.dims();
  cache.pool = maxpool2d(x);
  cache.c6_pre = conv2d(cache.pool.output, c6, 1, 0);
  cache.c6_out = relu(cache.c6_pre);
  cache.output = sigmoid(conv2d(cache.c6_out, out_conv, 1, 0));
  return cache.output;
}

GeneratorG::Grads GeneratorG::backward(const Cache& cache,
                                       const Tensor& grad_output) const {
  Tensor grad_pre = grad_output.reshaped(cache.output.dims());
  for (std::size_t i = 0; i < grad_pre.size(); ++i) {
    const Scalar s = cache.output[i];
    grad_pre[i] *= s * (1 - s);
  }
  Conv2dGrads g_out = conv2d_backward(cache.c6_out, out_conv, 1, 0, grad_pre);
  Conv2dGrads g_c6 = conv2d_backward(cache.pool.output, c6, 1, 0,
                                     relu_backward(cache.c6_pre, g_out.input));
  return {std::move(g_c6.params), std::move(g_out.params),
          maxpool2d_backward(cache.input_dims, cache.pool.argmax, g_c6.input)};
}

void GeneratorG::apply(const Grads& grads, const OptimizerSpec& spec) {
  sgd_step(c6, grads.c6, spec);
  sgd_step(out_conv, grads.out_conv, spec);
}

BaseWeightMask GeneratorG::base_mask(const Tensor& sbrf1_single) const {
  const Tensor o = forward(sbrf1_single);
  if (o.dim(0) != 1) {
    throw std::invalid_argument("base_mask expects a single sample");
  }
  return {static_cast<int>(o.dim(2)), static_cast<int>(o.dim(3)),
          std::vector<double>(o.values().begin(), o.values().end())};
}

std::vector<NamedTensor> GeneratorG::parameters() const {
  std::vector<NamedTensor> outp;
  push_layer(outp, "g.c6", c6);
  push_layer(outp, "g.out", out_conv);
  return outp;
}

void GeneratorG::load_parameters(std::span<const NamedTensor> params) {
  load_layer(params, "g.c6", c6);
  load_layer(params, "g.out", out_conv);
}

// ---- training -------------------------------------------------------------------

namespace {

void zero_masked(Tensor& batch, std::size_t index, const BinaryMask& mask) {
  const std::size_t plane = mask.values.size();
  const std::size_t item = batch.size() / batch.dim(0);
  Scalar* p = batch.data() + index * item;
  for (std::size_t i = 0; i < item; ++i) {
    if (mask.values[i % plane] == 0) p[i] = 0;
  }
}

void check_batch(const TrainingBatch& batch) {
  if (batch.labels.empty() || batch.sbrf1.rank() != 4 || batch.sbrf2.rank() != 4 ||
      batch.sbrf1.dim(0) != batch.labels.size() ||
      batch.sbrf2.dim(0) != batch.labels.size()) {
    throw std::invalid_argument("training batch: features " +
                                shape_string(batch.sbrf1.dims()) + " / " +
                                shape_string(batch.sbrf2.dims()) + " vs " +
                                std::to_string(batch.labels.size()) + " labels");
  }
}

}  // namespace

std::pair<Tensor, Tensor> adversarial_inputs(const GeneratorG& generator,
                                             const TrainingBatch& batch,
                                             const DStepOptions& options) {
  check_batch(batch);
  Tensor af1 = batch.sbrf1;
  Tensor af2 = batch.sbrf2;
  if (!options.use_generator) return {std::move(af1), std::move(af2)};

  std::vector<std::size_t> positives;
  for (std::size_t i = 0; i < batch.labels.size(); ++i) {
    if (batch.labels[i] == kPositiveClass) positives.push_back(i);
  }
  if (positives.empty()) return {std::move(af1), std::move(af2)};

  const Shape& d1 = batch.sbrf1.dims();
  Tensor pos1({positives.size(), d1[1], d1[2], d1[3]});
  for (std::size_t p = 0; p < positives.size(); ++p) {
    pos1.set_slice(p, batch.sbrf1.slice(positives[p]));
  }
  const Tensor bases = generator.forward(pos1);
  const int bh = static_cast<int>(bases.dim(2));
  const int bw = static_cast<int>(bases.dim(3));
  const std::size_t cells = static_cast<std::size_t>(bh * bw);
  const int h1 = static_cast<int>(d1[2]), w1 = static_cast<int>(d1[3]);
  const int h2 = static_cast<int>(batch.sbrf2.dim(2));
  const int w2 = static_cast<int>(batch.sbrf2.dim(3));
  for (std::size_t p = 0; p < positives.size(); ++p) {
    const auto first = bases.values().begin() + static_cast<std::ptrdiff_t>(p * cells);
    const BaseWeightMask base{bh, bw, std::vector<double>(first, first + static_cast<std::ptrdiff_t>(cells))};
    zero_masked(af1, positives[p], f2_generate(base, h1, w1, options.k_drop));
    zero_masked(af2, positives[p], f2_generate(base, h2, w2, options.k_drop));
  }
  return {std::move(af1), std::move(af2)};
}

DLossResult d_step_loss(const ClassifierD& classifier,
                        const GeneratorG& generator, const TrainingBatch& batch,
                        const DStepOptions& options) {
  const auto [af1, af2] = adversarial_inputs(generator, batch, options);
  ClassifierD::Cache cache;
  const Tensor logits = classifier.forward(af1, af2, cache);
  LossResult loss = cross_entropy_loss(logits, batch.labels);
  return {loss.loss, classifier.backward(cache, loss.grad_logits)};
}

double train_D_step(ClassifierD& classifier, const GeneratorG& generator,
                    const TrainingBatch& batch, const OptimizerSpec& spec,
                    const DStepOptions& options) {
  const DLossResult r = d_step_loss(classifier, generator, batch, options);
  classifier.apply(r.grads, spec);
  return r.loss;
}

double g_regression_loss(const GeneratorG& generator, const Tensor& sbrf1,
                         std::span<const BinaryMask> targets, double lambda,
                         GeneratorG::Grads* grads) {
  GeneratorG::Cache cache;
  const Tensor out = generator.forward(sbrf1, cache);
  const std::size_t n = out.dim(0);
  const std::size_t cells = out.dim(2) * out.dim(3);
  if (targets.size() != n) {
    throw std::invalid_argument("g_regression_loss: " + std::to_string(targets.size()) +
                                " targets for " + std::to_string(n) + " samples");
  }
  Tensor grad(out.dims());
  double loss = 0;
  const double scale = lambda / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (targets[i].values.size() != cells) {
      throw std::invalid_argument("g_regression_loss: target size mismatch");
    }
    for (std::size_t c = 0; c < cells; ++c) {
      const double diff = out[i * cells + c] - targets[i].values[c];
      loss += scale * diff * diff;
      grad[i * cells + c] = 2 * scale * diff;
    }
  }
  if (grads) *grads = generator.backward(cache, grad);
  return loss;
}

GStepResult train_G_step(GeneratorG& generator, const ClassifierD& classifier,
                         const SampledBatch& positives, const OptimizerSpec& spec,
                         double lambda) {
  const std::size_t n = positives.size();
  if (n == 0) throw std::invalid_argument("train_G_step needs at least one positive");
  const int h_m = static_cast<int>(positives.sbrf1.dim(2)) / 2;
  const int w_m = static_cast<int>(positives.sbrf1.dim(3)) / 2;
  const LogitsFn logits = classifier.as_logits_fn();

  GStepResult result;
  std::vector<BinaryMask> targets;
  for (std::size_t i = 0; i < n; ++i) {
    result.references.push_back(select_reference_mask(
        {positives.sbrf1.slice(i), positives.sbrf2.slice(i)}, logits, h_m, w_m));
    targets.push_back(result.references.back().base);
  }
  if (lambda == 0) return result;
  GeneratorG::Grads grads;
  result.loss = g_regression_loss(generator, positives.sbrf1, targets, lambda, &grads);
  generator.apply(grads, spec);
  return result;
}

// ---- raw-image baseline ---------------------------------------------------------

std::vector<double> raw_baseline_forward(std::span<const BBox> candidates,
                                         const Tensor& frame,
                                         const Backbone& backbone,
                                         const ClassifierD& classifier,
                                         const SamplerConfig& sampler, int L) {
  if (candidates.empty()) return {};
  const std::size_t n = candidates.size();
  const std::size_t c1 = classifier.af1_size() /
                         static_cast<std::size_t>(sampler.sbrf1_h * sampler.sbrf1_w);
  const std::size_t c2 = classifier.af2_size() /
                         static_cast<std::size_t>(sampler.sbrf2_h * sampler.sbrf2_w);
  Tensor af1({n, c1, static_cast<std::size_t>(sampler.sbrf1_h),
              static_cast<std::size_t>(sampler.sbrf1_w)});
  Tensor af2({n, c2, static_cast<std::size_t>(sampler.sbrf2_h),
              static_cast<std::size_t>(sampler.sbrf2_w)});
  const BBox whole{0, 0, static_cast<double>(L), static_cast<double>(L)};
  for (std::size_t i = 0; i < n; ++i) {
    const BBox& box = candidates[i];
    if (!box.valid()) throw std::invalid_argument("raw_baseline_forward: invalid box");
    PatchSpec spec;
    spec.crop_rect = box;
    spec.out_w = L;
    spec.out_h = L;
    spec.scale_x = L / box.w;
    spec.scale_y = L / box.h;
    spec.image_w = static_cast<int>(frame.dim(2));
    spec.image_h = static_cast<int>(frame.dim(1));
    const FeaturePair features = backbone.forward(extract_patch(frame, spec));
    const SampledFeatures s = sample_two_level(features, whole, sampler);
    af1.set_slice(i, s.sbrf1);
    af2.set_slice(i, s.sbrf2);
  }
  return classifier.positive_scores(af1, af2);
}

// ---- FLOP model -------------------------------------------------------------------

namespace {

double conv_flops(double in_c, double out_c, double k, double h, double w) {
  const double outputs = out_c * h * w;
  return outputs * (2 * in_c * k * k + 1 /*bias*/ + 1 /*relu*/);
}

double fc_flops(double in, double out, bool relu_after) {
  return out * (2 * in + 1 + (relu_after ? 1 : 0));
}

}  // namespace

double backbone_flops(const BackboneConfig& config, int patch_h, int patch_w) {
  double h = static_cast<double>(Backbone::padded_extent(static_cast<std::size_t>(patch_h)));
  double w = static_cast<double>(Backbone::padded_extent(static_cast<std::size_t>(patch_w)));
  const double width = config.width;
  double in = config.in_channels;
  double total = 0;
  for (int g = 0; g < Backbone::kGroups; ++g) {
    total += conv_flops(in, width, 3, h, w);
    in = width;
    if (g < 4) {
      total += width * h * w;  // pooling comparisons
      h /= 2;
      w /= 2;
    }
  }
  return total;
}

double head_flops(std::size_t af1_size, std::size_t af2_size,
                  const ClassifierConfig& config) {
  const double f1 = config.fc1_width, f2 = config.fc2_width;
  return fc_flops(static_cast<double>(af1_size), f1, true) +
         fc_flops(static_cast<double>(af2_size), f1, true) +
         fc_flops(2 * f1, f2, true) + fc_flops(f2, 2, false);
}

double sbr_flops(std::size_t channels1, std::size_t points1,
                 std::size_t channels2, std::size_t points2) {
  // Per point: ~10 ops for coordinates and weights; per channel value: four
  // multiply-adds.
  auto level = [](double c, double p) { return p * 10 + c * p * 8; };
  return level(static_cast<double>(channels1), static_cast<double>(points1)) +
         level(static_cast<double>(channels2), static_cast<double>(points2));
}

}  // namespace afsl
