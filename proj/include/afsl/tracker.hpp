// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_TRACKER_HPP_
#define AFSL_TRACKER_HPP_

#include <cstdint>
#include <deque>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "afsl/feature_sampler.hpp"
#include "afsl/geometry.hpp"
#include "afsl/layers.hpp"
#include "afsl/networks.hpp"

namespace afsl {

struct TrackerConfig {
  // Patch geometry.
  double r_c = 1.2;
  int L = 112;

  // Sampled feature and base mask sizes.
  int sbrf1_h = 6, sbrf1_w = 6;
  int sbrf2_h = 8, sbrf2_w = 8;
  int base_mask_h = 3, base_mask_w = 3;
  bool swap_levels = false;
  bool grid_endpoints = false;

  // Network sizes.
  int backbone_width = 32;
  int fc1_width = 256;
  int fc2_width = 512;
  int g_hidden = 256;

  // Online learning schedule.
  int init_iters = 60;
  int update_period = 10;
  int update_iters = 10;
  OptimizerSpec d_opt{0.01, 0.9, 0.0005};
  OptimizerSpec g_opt{0.00005, 0.9, 0.0005};
  int batch_pos = 32;
  int batch_neg = 96;
  int neg_pool = 1024;
  double lambda = 1.0;
  int k_drop = 1;
  bool use_generator = true;

  // Detection.
  int n_candidates = 256;
  double cand_trans_sigma = 0.1;
  double cand_scale_sigma = 0.5;
  int top_k = 5;

  // Training sample collection.
  double pos_iou = 0.7;
  double neg_iou = 0.3;
  int init_pos = 500;
  int init_neg = 5000;
  int update_pos = 50;
  int update_neg = 200;
  double pos_trans_sigma = 0.1;
  double pos_scale_sigma = 1.0;
  double neg_trans_sigma = 0.6;
  double neg_scale_sigma = 2.0;
  int reservoir_horizon = 100;

  std::uint64_t seed = 1;
  std::uint64_t backbone_seed = 2018;
  int threads = 1;

  /// All values as stated for the published tracker (r_c = 1.2).
  static TrackerConfig paper();
  /// Published values with the wider r_c = 2.0 search window used by the
  /// command-line harness.
  static TrackerConfig harness_default();

  /// Throws std::invalid_argument naming the first inconsistent field.
  void validate() const;

  SamplerConfig sampler() const;
};

/// How detect() scores its candidates.
enum class ScoringMode {
  kSampledFeatures,  // one backbone pass per frame, candidates resampled
  kRawBaseline       // one backbone pass per candidate crop
};

/// Training samples collected on one frame. Features are kept per frame and
/// candidates are re-sampled from them on demand, which is exactly what
/// storing the sampled features would give.
struct FrameSamples {
  int frame_index = 0;
  FeaturePair features;
  std::vector<BBox> positives;  // patch coordinates
  std::vector<BBox> negatives;
};

struct SampleRef {
  std::size_t slot = 0;  // index into the reservoir
  std::size_t index = 0;  // index into that frame's positives/negatives
  friend bool operator==(const SampleRef&, const SampleRef&) = default;
};

struct MiningResult {
  std::vector<SampleRef> pool;
  std::vector<SampleRef> selected;
  std::vector<double> pool_scores;
};

struct Detection {
  BBox box;
  double confidence = 0;
};

class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Builds the networks, collects first-frame samples and runs
  /// init_iters alternating D / G steps.
  void init(const Tensor& first_frame, const BBox& gt_box);

  /// Scores candidates around the previous box without masking; the mean of
  /// the top-k boxes becomes the new estimate.
  Detection detect(const Tensor& frame,
                   ScoringMode mode = ScoringMode::kSampledFeatures);

  /// Stores samples around `estimated_box` and, on every update_period-th
  /// frame, runs update_iters rounds of mining + D step + G step.
  void update(const Tensor& frame, const BBox& estimated_box);

  /// Scores pool_size reservoir negatives with D and keeps the `take`
  /// highest positive-class scores (ties: pool order).
  MiningResult mine_hard_negatives(int pool_size, int take);

  /// One training round; returns (D loss, G loss).
  std::pair<double, double> train_iteration();

  /// Observer called with (D loss, G loss) after each training round.
  void set_training_observer(std::function<void(double, double)> observer) {
    observer_ = std::move(observer);
  }

  bool initialized() const { return initialized_; }
  int frame_index() const { return frame_index_; }
  const BBox& current_box() const { return current_box_; }
  const TrackerConfig& config() const { return config_; }

  const Backbone& backbone() const { return backbone_; }
  Backbone& backbone() { return backbone_; }
  const ClassifierD& classifier() const { return classifier_; }
  ClassifierD& classifier() { return classifier_; }
  const GeneratorG& generator() const { return generator_; }
  GeneratorG& generator() { return generator_; }

  const std::deque<FrameSamples>& reservoir() const { return reservoir_; }
  std::deque<FrameSamples>& reservoir() { return reservoir_; }

  /// Gathers sampled features for reservoir entries.
  SampledBatch gather(std::span<const SampleRef> refs, bool positives) const;

  /// Samples collected on a frame: patch geometry, features and labelled
  /// boxes around `box`.
  FrameSamples collect_samples(const Tensor& frame, const BBox& box,
                               int n_pos, int n_neg, PatchSpec* spec_out = nullptr);

 private:
  std::vector<BBox> draw_labeled(const BBox& target, const SampleRegion& region,
                                 int count, Label label);
  std::vector<SampleRef> draw_positive_batch(int count);
  void push_frame(FrameSamples samples);
  BBox clamp_to_image(const BBox& box, int image_w, int image_h) const;

  TrackerConfig config_;
  Backbone backbone_;
  ClassifierD classifier_;
  GeneratorG generator_;
  std::deque<FrameSamples> reservoir_;
  std::mt19937_64 rng_;
  std::function<void(double, double)> observer_;
  BBox current_box_;
  int frame_index_ = 0;
  bool initialized_ = false;
};

struct FrameResult {
  BBox box;
  double confidence = 0;
  double ms = 0;
};

/// Runs init on frame 1 and detect + update on the rest. Frame 1 reports the
/// given box with confidence 1.
std::vector<FrameResult> track_sequence(
    std::span<const Tensor> frames, const BBox& gt_first,
    const TrackerConfig& config,
    ScoringMode mode = ScoringMode::kSampledFeatures);

}  // namespace afsl

#endif  // AFSL_TRACKER_HPP_
