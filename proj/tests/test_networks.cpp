// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "afsl/checkpoint.hpp"
#include "afsl/layers.hpp"
#include "afsl/networks.hpp"
#include "support/oracles.hpp"

namespace afsl {
namespace {

using oracle::random_tensor;

void zero_params(LayerParams& p) {
  p.weights.fill(0);
  p.biases.fill(0);
}

// ---- backbone ---------------------------------------------------------------------

TEST(Backbone, TapStrides) {
  const Backbone bb({3, 4}, 1);
  const FeaturePair f = bb.forward(Tensor({3, 112, 112}, 0.5));
  EXPECT_EQ(f.level1.dims(), (Shape{4, 14, 14}));
  EXPECT_EQ(f.level2.dims(), (Shape{4, 7, 7}));
}

TEST(Backbone, PadsUpToSixteen) {
  const Backbone bb({3, 4}, 1);
  EXPECT_EQ(Backbone::padded_extent(134), 144u);
  const FeaturePair f = bb.forward(Tensor({3, 134, 134}, 0.5));
  EXPECT_EQ(f.level1.dims(), (Shape{4, 18, 18}));
  EXPECT_EQ(f.level2.dims(), (Shape{4, 9, 9}));
}

TEST(Backbone, RejectsUndersizedOrWrongChannels) {
  const Backbone bb({3, 4}, 1);
  EXPECT_THROW(bb.forward(Tensor({3, 15, 40})), std::invalid_argument);
  EXPECT_THROW(bb.forward(Tensor({1, 32, 32})), std::invalid_argument);
}

TEST(Backbone, ZeroInputZeroBiasGivesZeroFeatures) {
  Backbone bb({3, 8}, 3);
  for (LayerParams& g : bb.groups()) g.biases.fill(0);
  const FeaturePair f = bb.forward(Tensor({3, 32, 48}));
  for (Scalar v : f.level1.values()) EXPECT_EQ(v, 0);
  for (Scalar v : f.level2.values()) EXPECT_EQ(v, 0);
}

TEST(Backbone, LowerGroupsFrozenAndCountsForwards) {
  Backbone bb({3, 4}, 1);
  for (int g = 0; g < 3; ++g) EXPECT_TRUE(bb.groups()[static_cast<std::size_t>(g)].frozen);
  bb.reset_forward_count();
  bb.forward(Tensor({3, 16, 16}));
  bb.forward(Tensor({3, 16, 16}));
  EXPECT_EQ(bb.forward_count(), 2u);
}

TEST(Backbone, SameSeedSameWeights) {
  const Backbone a({3, 4}, 9), b({3, 4}, 9), c({3, 4}, 10);
  EXPECT_EQ(a.groups()[4].weights, b.groups()[4].weights);
  EXPECT_NE(a.groups()[4].weights, c.groups()[4].weights);
}

// ---- classifier -----------------------------------------------------------------

ClassifierD small_d(std::uint64_t seed) { return ClassifierD(2 * 36, 2 * 64, {16, 24}, seed); }

TEST(Classifier, ZeroWeightsGiveEvenOdds) {
  ClassifierD d = small_d(1);
  for (LayerParams* p : {&d.fc1_1, &d.fc1_2, &d.fc2, &d.out}) zero_params(*p);
  std::mt19937_64 rng(1);
  const Tensor a = random_tensor({3, 2, 6, 6}, rng), b = random_tensor({3, 2, 8, 8}, rng);
  const Tensor logits = d.forward(a, b);
  EXPECT_EQ(logits.dims(), (Shape{3, 2}));
  for (Scalar v : logits.values()) EXPECT_EQ(v, 0);
  for (double p : d.positive_scores(a, b)) EXPECT_EQ(p, 0.5);
}

TEST(Classifier, RowsDependOnlyOnTheirSample) {
  const ClassifierD d = small_d(2);
  std::mt19937_64 rng(2);
  const Tensor a = random_tensor({4, 2, 6, 6}, rng), b = random_tensor({4, 2, 8, 8}, rng);
  const Tensor batched = d.forward(a, b);
  for (std::size_t i = 0; i < 4; ++i) {
    const Tensor single = d.forward(a.slice(i), b.slice(i));
    EXPECT_NEAR(single[0], batched[2 * i], 1e-12);
    EXPECT_NEAR(single[1], batched[2 * i + 1], 1e-12);
  }
}

TEST(Classifier, PositivelyHomogeneousWithZeroBiases) {
  ClassifierD d = small_d(3);
  for (LayerParams* p : {&d.fc1_1, &d.fc1_2, &d.fc2, &d.out}) p->biases.fill(0);
  std::mt19937_64 rng(3);
  const Tensor a = random_tensor({2, 2, 6, 6}, rng, 0, 1), b = random_tensor({2, 2, 8, 8}, rng, 0, 1);
  Tensor a2 = a, b2 = b;
  for (Scalar& v : a2.values()) v *= 2;
  for (Scalar& v : b2.values()) v *= 2;
  const Tensor l1 = d.forward(a, b), l2 = d.forward(a2, b2);
  for (std::size_t i = 0; i < l1.size(); ++i) EXPECT_NEAR(l2[i], 2 * l1[i], 1e-12);
}

TEST(Classifier, RejectsWrongInputSize) {
  const ClassifierD d = small_d(4);
  EXPECT_THROW(d.forward(Tensor({1, 2, 5, 5}), Tensor({1, 2, 8, 8})), std::invalid_argument);
}

// ---- generator ------------------------------------------------------------------

TEST(Generator, OutputIsThreeByThreeInUnitInterval) {
  const GeneratorG g(4, {16}, 5);
  std::mt19937_64 rng(5);
  const Tensor out = g.forward(random_tensor({2, 4, 6, 6}, rng, -3, 3));
  EXPECT_EQ(out.dims(), (Shape{2, 1, 3, 3}));
  for (Scalar v : out.values()) {
    EXPECT_GT(v, 0);
    EXPECT_LT(v, 1);
  }
  const BaseWeightMask m = g.base_mask(random_tensor({4, 6, 6}, rng));
  EXPECT_EQ(m.h, 3);
  EXPECT_EQ(m.w, 3);
}

TEST(Generator, ZeroWeightsGiveOneHalf) {
  GeneratorG g(4, {16}, 6);
  zero_params(g.c6);
  zero_params(g.out_conv);
  std::mt19937_64 rng(6);
  const Tensor out = g.forward(random_tensor({4, 6, 6}, rng));
  for (Scalar v : out.values()) EXPECT_EQ(v, 0.5);
}

TEST(Generator, SpatiallyConstantInputGivesConstantMask) {
  const GeneratorG g(3, {16}, 7);
  Tensor x({3, 6, 6});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t i = 0; i < 36; ++i) x[c * 36 + i] = 0.3 * static_cast<double>(c) - 0.2;
  }
  const Tensor out = g.forward(x);
  for (Scalar v : out.values()) EXPECT_EQ(v, out[0]);
}

TEST(Generator, RejectsOddSpatialDims) {
  const GeneratorG g(3, {16}, 8);
  EXPECT_THROW(g.forward(Tensor({3, 5, 6})), std::invalid_argument);
}

// ---- D step -----------------------------------------------------------------------

// Positives around +0.4, negatives around -0.4, on every feature.
TrainingBatch cluster_batch(std::size_t n_pos, std::size_t n_neg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0, 0.3);
  const std::size_t n = n_pos + n_neg;
  TrainingBatch batch{Tensor({n, 2, 6, 6}), Tensor({n, 2, 8, 8}), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const bool pos = i < n_pos;
    batch.labels.push_back(pos ? kPositiveClass : kNegativeClass);
    const double mu = pos ? 0.4 : -0.4;
    const std::size_t s1 = batch.sbrf1.size() / n, s2 = batch.sbrf2.size() / n;
    for (std::size_t k = 0; k < s1; ++k) batch.sbrf1[i * s1 + k] = mu + noise(rng);
    for (std::size_t k = 0; k < s2; ++k) batch.sbrf2[i * s2 + k] = mu + noise(rng);
  }
  return batch;
}

TEST(TrainD, SeparableClustersHalveTheLoss) {
  ClassifierD d = small_d(11);
  const GeneratorG g(2, {16}, 12);
  const TrainingBatch batch = cluster_batch(32, 96, 13);
  const OptimizerSpec spec{0.01, 0.9, 0.0005};
  std::vector<double> losses;
  for (int it = 0; it < 60; ++it) losses.push_back(train_D_step(d, g, batch, spec, {}));
  EXPECT_LE(losses.back(), 0.5 * losses.front());
}

TEST(TrainD, WithoutGeneratorIsPlainSupervisedStep) {
  ClassifierD a = small_d(14);
  ClassifierD b = a;
  const GeneratorG g(2, {16}, 15);
  const TrainingBatch batch = cluster_batch(4, 6, 16);
  const OptimizerSpec spec{0.05, 0.9, 0.0005};
  DStepOptions off;
  off.use_generator = false;
  train_D_step(a, g, batch, spec, off);

  ClassifierD::Cache cache;
  const Tensor logits = b.forward(batch.sbrf1, batch.sbrf2, cache);
  const LossResult loss = cross_entropy_loss(logits, batch.labels);
  b.apply(b.backward(cache, loss.grad_logits), spec);
  EXPECT_EQ(a.fc1_1.weights, b.fc1_1.weights);
  EXPECT_EQ(a.fc2.weights, b.fc2.weights);
  EXPECT_EQ(a.out.biases, b.out.biases);
}

TEST(TrainD, MasksOnlyPositives) {
  const GeneratorG g(2, {16}, 17);
  const TrainingBatch batch = cluster_batch(3, 5, 18);
  const auto [af1, af2] = adversarial_inputs(g, batch, {});
  for (std::size_t i = 3; i < 8; ++i) {
    EXPECT_EQ(af1.slice(i), batch.sbrf1.slice(i));
    EXPECT_EQ(af2.slice(i), batch.sbrf2.slice(i));
  }
  for (std::size_t i = 0; i < 3; ++i) {
    const BinaryMask m = f2_generate(g.base_mask(batch.sbrf1.slice(i)), 6, 6, 1);
    EXPECT_EQ(af1.slice(i), apply_mask(batch.sbrf1.slice(i), m));
  }
}

TEST(TrainD, RepeatedBatchPlainDescentNeverIncreases) {
  ClassifierD d = small_d(19);
  const GeneratorG g(2, {16}, 20);
  const TrainingBatch batch = cluster_batch(8, 24, 21);
  const std::vector<int> labels_before = batch.labels;
  const OptimizerSpec spec{0.002, 0, 0};
  double prev = train_D_step(d, g, batch, spec, {});
  for (int it = 0; it < 30; ++it) {
    const double now = train_D_step(d, g, batch, spec, {});
    EXPECT_LE(now, prev + 1e-12);
    prev = now;
  }
  EXPECT_EQ(batch.labels, labels_before);
}

// ---- G step -----------------------------------------------------------------------

SampledBatch one_positive(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {random_tensor({1, 2, 6, 6}, rng, 0, 1), random_tensor({1, 2, 8, 8}, rng, 0, 1)};
}

TEST(TrainG, RegressionLossNonIncreasingAndDUntouched) {
  GeneratorG g(2, {16}, 22);
  const ClassifierD d = small_d(23);
  const ClassifierD d_before = d;
  const SampledBatch pos = one_positive(24);
  const OptimizerSpec spec{0.00005, 0.9, 0.0005};
  std::vector<double> losses;
  for (int it = 0; it < 100; ++it) losses.push_back(train_G_step(g, d, pos, spec, 1.0).loss);
  for (std::size_t t = 1; t < losses.size(); ++t) EXPECT_LE(losses[t], losses[t - 1] + 1e-8);
  EXPECT_LT(losses.back(), losses.front());
  EXPECT_EQ(d.fc1_1.weights, d_before.fc1_1.weights);
  EXPECT_EQ(d.out.weights, d_before.out.weights);
}

TEST(TrainG, ReferenceIsTheHighestLossMask) {
  GeneratorG g(2, {16}, 25);
  const ClassifierD d = small_d(26);
  const SampledBatch pos = one_positive(27);
  const GStepResult r = train_G_step(g, d, pos, {0.00005, 0.9, 0.0005}, 1.0);
  const ReferenceMask expect = select_reference_mask({pos.sbrf1.slice(0), pos.sbrf2.slice(0)},
                                                     d.as_logits_fn(), 3, 3);
  ASSERT_EQ(r.references.size(), 1u);
  EXPECT_EQ(r.references[0].cell, expect.cell);
}

TEST(TrainG, ZeroLambdaLeavesGeneratorUnchanged) {
  GeneratorG g(2, {16}, 28);
  const GeneratorG before = g;
  train_G_step(g, small_d(29), one_positive(30), {0.1, 0.9, 0.0005}, 0.0);
  EXPECT_EQ(g.c6.weights, before.c6.weights);
  EXPECT_EQ(g.out_conv.weights, before.out_conv.weights);
  EXPECT_EQ(g.out_conv.biases, before.out_conv.biases);
}

TEST(TrainG, RegressionLossValue) {
  GeneratorG g(2, {16}, 31);
  zero_params(g.c6);
  zero_params(g.out_conv);  // output 0.5 everywhere
  const std::vector<BinaryMask> target{enumerate_single_zero_masks(3, 3)[4]};
  const SampledBatch pos = one_positive(32);
  EXPECT_NEAR(g_regression_loss(g, pos.sbrf1, target, 2.0, nullptr), 2.0 * 9 * 0.25, 1e-12);
}

// ---- raw-image baseline ---------------------------------------------------------------

TEST(RawBaseline, OneBackbonePassPerCandidate) {
  Backbone bb({3, 2}, 33);
  const ClassifierD d(2 * 36, 2 * 64, {8, 8}, 34);
  std::mt19937_64 rng(35);
  const Tensor frame = random_tensor({3, 60, 80}, rng, 0, 1);
  std::vector<BBox> boxes;
  for (int i = 0; i < 7; ++i) boxes.push_back({5.0 + i, 8.0 + i, 20, 24});
  bb.reset_forward_count();
  const auto scores = raw_baseline_forward(boxes, frame, bb, d, {}, 32);
  EXPECT_EQ(scores.size(), 7u);
  EXPECT_EQ(bb.forward_count(), 7u);
}

TEST(RawBaseline, SingleCandidateIsCropBackboneHead) {
  const Backbone bb({3, 2}, 36);
  const ClassifierD d(2 * 36, 2 * 64, {8, 8}, 37);
  std::mt19937_64 rng(38);
  const Tensor frame = random_tensor({3, 60, 80}, rng, 0, 1);
  const BBox box{10, 12, 30, 20};
  const double score = raw_baseline_forward(std::vector<BBox>{box}, frame, bb, d, {}, 32)[0];

  PatchSpec spec;
  spec.crop_rect = box;
  spec.out_w = spec.out_h = 32;
  spec.scale_x = 32 / box.w;
  spec.scale_y = 32 / box.h;
  spec.image_w = 80;
  spec.image_h = 60;
  const FeaturePair f = bb.forward(extract_patch(frame, spec));
  const SampledFeatures s = sample_two_level(f, {0, 0, 32, 32}, {});
  EXPECT_NEAR(score, d.positive_scores(s.sbrf1, s.sbrf2)[0], 1e-12);
}

// ---- FLOP model -------------------------------------------------------------------

TEST(Flops, HandCountedBackbone) {
  // width 1, RGB, 16x16: groups at 16, 8, 4, 2, 1 with pooling after 1-4.
  EXPECT_DOUBLE_EQ(backbone_flops({3, 1}, 16, 16), 16376);
  EXPECT_DOUBLE_EQ(backbone_flops({3, 1}, 15, 9), 16376);  // padded up
}

TEST(Flops, HandCountedHead) {
  EXPECT_DOUBLE_EQ(head_flops(2, 3, {4, 5}), 168);
}

// ---- checkpoint -------------------------------------------------------------------

TEST(Checkpoint, RoundTripPreservesEveryValue) {
  const ClassifierD d = small_d(40);
  const GeneratorG g(2, {16}, 41);
  std::vector<NamedTensor> groups = d.parameters();
  for (NamedTensor& t : g.parameters()) groups.push_back(t);
  const auto path = std::filesystem::temp_directory_path() / "afsl_ckpt_roundtrip.bin";
  save_checkpoint(path, groups);
  const std::vector<NamedTensor> loaded = load_checkpoint(path);
  ASSERT_EQ(loaded.size(), groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    EXPECT_EQ(loaded[i].name, groups[i].name);
    // stored as 32-bit floats
    Tensor rounded = groups[i].value;
    for (Scalar& v : rounded.values()) v = static_cast<float>(v);
    EXPECT_EQ(loaded[i].value, rounded);
  }
  ClassifierD e = small_d(99);
  e.load_parameters(std::span(loaded).first(d.parameters().size()));
  EXPECT_EQ(e.fc1_2.weights, loaded[2].value);
  std::filesystem::remove(path);
}

TEST(Checkpoint, RejectsForeignFile) {
  const auto path = std::filesystem::temp_directory_path() / "afsl_ckpt_bad.bin";
  std::ofstream(path, std::ios::binary) << "NOPE and some bytes";
  EXPECT_THROW(load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace afsl
