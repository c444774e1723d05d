// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/tracker.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace afsl {

TrackerConfig TrackerConfig::paper() { return TrackerConfig{}; }

TrackerConfig TrackerConfig::harness_default() {
  TrackerConfig c;
  c.r_c = 2.0;
  return c;
}

void TrackerConfig::validate() const {
  auto require = [](bool ok, const char* field) {
    if (!ok) throw std::invalid_argument(std::string("invalid config value: ") + field);
  };
  require(r_c >= 1, "r_c");
  require(L >= 16, "L");
  require(sbrf1_h >= 2 && sbrf1_w >= 2 && sbrf1_h % 2 == 0 && sbrf1_w % 2 == 0,
          "sbrf1_dims");
  require(sbrf2_h >= 1 && sbrf2_w >= 1, "sbrf2_dims");
  require(base_mask_h == sbrf1_h / 2 && base_mask_w == sbrf1_w / 2,
          "base_mask_dims");
  require(base_mask_h <= sbrf2_h && base_mask_w <= sbrf2_w, "base_mask_dims");
  require(backbone_width >= 1, "backbone_width");
  require(fc1_width >= 1, "fc1_width");
  require(fc2_width >= 1, "fc2_width");
  require(g_hidden >= 1, "g_hidden");
  require(init_iters >= 0, "init_iters");
  require(update_period >= 1, "update_period");
  require(update_iters >= 0, "update_iters");
  d_opt.validate();
  g_opt.validate();
  require(batch_pos >= 1, "batch_pos");
  require(batch_neg >= 1, "batch_neg");
  require(neg_pool >= batch_neg, "neg_pool");
  require(lambda >= 0 && std::isfinite(lambda), "lambda");
  require(k_drop >= 1 && k_drop <= base_mask_h * base_mask_w, "k_drop");
  require(n_candidates >= 1, "n_candidates");
  require(cand_trans_sigma >= 0, "cand_trans_sigma");
  require(cand_scale_sigma >= 0, "cand_scale_sigma");
  require(top_k >= 1, "top_k");
  require(pos_iou > neg_iou && pos_iou <= 1 && neg_iou >= 0, "pos_iou/neg_iou");
  require(init_pos >= 1 && init_neg >= 1, "init_pos/init_neg");
  require(update_pos >= 0 && update_neg >= 0, "update_pos/update_neg");
  require(pos_trans_sigma >= 0 && pos_scale_sigma >= 0, "pos sigmas");
  require(neg_trans_sigma >= 0 && neg_scale_sigma >= 0, "neg sigmas");
  require(reservoir_horizon >= 1, "reservoir_horizon");
  require(threads >= 1, "threads");
}

SamplerConfig TrackerConfig::sampler() const {
  SamplerConfig s;
  s.sbrf1_h = sbrf1_h;
  s.sbrf1_w = sbrf1_w;
  s.sbrf2_h = sbrf2_h;
  s.sbrf2_w = sbrf2_w;
  s.swap_levels = swap_levels;
  s.grid = grid_endpoints ? GridConvention::kEndpointsInclusive
                          : GridConvention::kCellCenters;
  return s;
}

// ---- Tracker ------------------------------------------------------------------

Tracker::Tracker(TrackerConfig config)
    : config_(std::move(config)), rng_(config_.seed) {
  config_.validate();
  const BackboneConfig bb{3, config_.backbone_width};
  backbone_ = Backbone(bb, config_.backbone_seed);
  const auto width = static_cast<std::size_t>(config_.backbone_width);
  const std::size_t af1 = width * static_cast<std::size_t>(config_.sbrf1_h * config_.sbrf1_w);
  const std::size_t af2 = width * static_cast<std::size_t>(config_.sbrf2_h * config_.sbrf2_w);
  classifier_ = ClassifierD(af1, af2, {config_.fc1_width, config_.fc2_width},
                            config_.seed * 0x9E3779B97F4A7C15ULL + 1);
  generator_ = GeneratorG(width, {config_.g_hidden},
                          config_.seed * 0x9E3779B97F4A7C15ULL + 2);
  // The whole backbone stays fixed while tracking.
  for (LayerParams& g : backbone_.groups()) g.frozen = true;
}

BBox Tracker::clamp_to_image(const BBox& box, int image_w, int image_h) const {
  const double w = std::clamp(box.w, 4.0, static_cast<double>(image_w));
  const double h = std::clamp(box.h, 4.0, static_cast<double>(image_h));
  // Keep the centre on the image footprint (1, 1, W, H).
  const double cx = std::clamp(box.center_x(), 1.0, image_w + 1.0);
  const double cy = std::clamp(box.center_y(), 1.0, image_h + 1.0);
  return BBox::from_center(cx, cy, w, h);
}

std::vector<BBox> Tracker::draw_labeled(const BBox& target,
                                        const SampleRegion& region, int count,
                                        Label label) {
  std::vector<BBox> out;
  if (count <= 0) return out;
  const bool positive = label == Label::kPositive;
  const double trans = positive ? config_.pos_trans_sigma : config_.neg_trans_sigma;
  const double scale = positive ? config_.pos_scale_sigma : config_.neg_scale_sigma;
  // Rejection sampling against the IoU rule; bounded so a pathological
  // geometry returns fewer samples instead of spinning.
  for (int round = 0; round < 50 && static_cast<int>(out.size()) < count; ++round) {
    const int want = 2 * (count - static_cast<int>(out.size())) + 16;
    const std::vector<BBox> boxes =
        sample_candidates(target, want, trans, scale, rng_, region);
    for (const LabeledSample& s :
         label_samples(boxes, target, config_.pos_iou, config_.neg_iou)) {
      if (s.label == label && static_cast<int>(out.size()) < count) {
        out.push_back(s.box);
      }
    }
  }
  return out;
}

FrameSamples Tracker::collect_samples(const Tensor& frame, const BBox& box,
                                      int n_pos, int n_neg, PatchSpec* spec_out) {
  const int image_w = static_cast<int>(frame.dim(2));
  const int image_h = static_cast<int>(frame.dim(1));
  const PatchSpec spec = crop_and_resize_spec(box, image_w, image_h, config_.r_c, config_.L);
  if (spec_out) *spec_out = spec;
  FrameSamples samples;
  samples.frame_index = frame_index_;
  samples.features = backbone_.forward(extract_patch(frame, spec));
  const BBox target = map_box_to_patch(box, spec);
  const SampleRegion region{static_cast<double>(spec.out_w),
                            static_cast<double>(spec.out_h)};
  samples.positives = draw_labeled(target, region, n_pos, Label::kPositive);
  samples.negatives = draw_labeled(target, region, n_neg, Label::kNegative);
  return samples;
}

void Tracker::push_frame(FrameSamples samples) {
  reservoir_.push_back(std::move(samples));
  while (static_cast<int>(reservoir_.size()) > config_.reservoir_horizon) {
    reservoir_.pop_front();
  }
}

void Tracker::init(const Tensor& first_frame, const BBox& gt_box) {
  if (first_frame.rank() != 3 || first_frame.dim(0) != 3) {
    throw std::invalid_argument("tracker expects (3,H,W) frames, got " +
                                shape_string(first_frame.dims()));
  }
  if (!gt_box.valid() || gt_box.w < 1 || gt_box.h < 1) {
    throw std::invalid_argument("tracker init: degenerate ground-truth box");
  }
  reservoir_.clear();
  frame_index_ = 1;
  current_box_ = gt_box;
  push_frame(collect_samples(first_frame, gt_box, config_.init_pos, config_.init_neg));
  initialized_ = true;
  for (int it = 0; it < config_.init_iters; ++it) train_iteration();
}

SampledBatch Tracker::gather(std::span<const SampleRef> refs, bool positives) const {
  const SamplerConfig sampler = config_.sampler();
  const auto c = static_cast<std::size_t>(config_.backbone_width);
  const std::size_t n = refs.size();
  SampledBatch batch{
      Tensor({n, c, static_cast<std::size_t>(config_.sbrf1_h),
              static_cast<std::size_t>(config_.sbrf1_w)}),
      Tensor({n, c, static_cast<std::size_t>(config_.sbrf2_h),
              static_cast<std::size_t>(config_.sbrf2_w)})};
  for (std::size_t i = 0; i < n; ++i) {
    const FrameSamples& f = reservoir_.at(refs[i].slot);
    const BBox& box = positives ? f.positives.at(refs[i].index)
                                : f.negatives.at(refs[i].index);
    const SampledFeatures s = sample_two_level(f.features, box, sampler);
    batch.sbrf1.set_slice(i, s.sbrf1);
    batch.sbrf2.set_slice(i, s.sbrf2);
  }
  return batch;
}

namespace {

// Uniform draw of `count` references out of `all`: without replacement when
// possible; otherwise every reference once, then random extras.
std::vector<SampleRef> draw_refs(const std::vector<SampleRef>& all, int count,
                                 std::mt19937_64& rng) {
  std::vector<SampleRef> out;
  if (all.empty() || count <= 0) return out;
  const auto want = static_cast<std::size_t>(count);
  if (all.size() >= want) {
    std::vector<std::size_t> idx(all.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates with an explicit uniform draw (portable order).
    for (std::size_t i = 0; i < want; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.push_back(all[idx[i]]);
    }
    return out;
  }
  out = all;
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  while (out.size() < want) out.push_back(all[pick(rng)]);
  return out;
}

std::vector<SampleRef> all_refs(const std::deque<FrameSamples>& reservoir,
                                bool positives) {
  std::vector<SampleRef> refs;
  for (std::size_t s = 0; s < reservoir.size(); ++s) {
    const std::size_t n = positives ? reservoir[s].positives.size()
                                    : reservoir[s].negatives.size();
    for (std::size_t i = 0; i < n; ++i) refs.push_back({s, i});
  }
  return refs;
}

}  // namespace

std::vector<SampleRef> Tracker::draw_positive_batch(int count) {
  return draw_refs(all_refs(reservoir_, true), count, rng_);
}

MiningResult Tracker::mine_hard_negatives(int pool_size, int take) {
  const std::vector<SampleRef> negatives = all_refs(reservoir_, false);
  if (negatives.empty()) {
    throw std::invalid_argument("mine_hard_negatives: reservoir holds no negatives");
  }
  MiningResult result;
  result.pool = draw_refs(negatives, pool_size, rng_);
  const SampledBatch features = gather(result.pool, false);
  result.pool_scores = classifier_.positive_scores(features.sbrf1, features.sbrf2);
  std::vector<std::size_t> order(result.pool.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return result.pool_scores[a] > result.pool_scores[b];
  });
  const auto keep = std::min<std::size_t>(order.size(), static_cast<std::size_t>(std::max(take, 0)));
  for (std::size_t i = 0; i < keep; ++i) result.selected.push_back(result.pool[order[i]]);
  return result;
}

std::pair<double, double> Tracker::train_iteration() {
  if (!initialized_) throw std::logic_error("tracker is not initialized");
  const std::vector<SampleRef> pos_refs = draw_positive_batch(config_.batch_pos);
  if (pos_refs.empty()) return {0.0, 0.0};
  const MiningResult mined = mine_hard_negatives(config_.neg_pool, config_.batch_neg);

  const SampledBatch pos = gather(pos_refs, true);
  const SampledBatch neg = gather(mined.selected, false);
  const std::size_t np = pos.size(), nn = neg.size();
  const Shape& d1 = pos.sbrf1.dims();
  const Shape& d2 = pos.sbrf2.dims();
  TrainingBatch batch{Tensor({np + nn, d1[1], d1[2], d1[3]}),
                      Tensor({np + nn, d2[1], d2[2], d2[3]}),
                      {}};
  std::copy_n(pos.sbrf1.data(), pos.sbrf1.size(), batch.sbrf1.data());
  std::copy_n(neg.sbrf1.data(), neg.sbrf1.size(), batch.sbrf1.data() + pos.sbrf1.size());
  std::copy_n(pos.sbrf2.data(), pos.sbrf2.size(), batch.sbrf2.data());
  std::copy_n(neg.sbrf2.data(), neg.sbrf2.size(), batch.sbrf2.data() + pos.sbrf2.size());
  batch.labels.assign(np, kPositiveClass);
  batch.labels.insert(batch.labels.end(), nn, kNegativeClass);

  const DStepOptions options{config_.k_drop, config_.use_generator,
                             config_.base_mask_h, config_.base_mask_w};
  const double d_loss = train_D_step(classifier_, generator_, batch, config_.d_opt, options);
  double g_loss = 0;
  if (config_.use_generator) {
    g_loss = train_G_step(generator_, classifier_, pos, config_.g_opt, config_.lambda).loss;
  }
  if (observer_) observer_(d_loss, g_loss);
  return {d_loss, g_loss};
}

Detection Tracker::detect(const Tensor& frame, ScoringMode mode) {
  if (!initialized_) throw std::logic_error("detect called before init");
  const int image_w = static_cast<int>(frame.dim(2));
  const int image_h = static_cast<int>(frame.dim(1));
  const PatchSpec spec =
      crop_and_resize_spec(current_box_, image_w, image_h, config_.r_c, config_.L);
  const BBox prev = map_box_to_patch(current_box_, spec);
  const std::vector<BBox> candidates = sample_candidates(
      prev, config_.n_candidates, config_.cand_trans_sigma, config_.cand_scale_sigma,
      rng_, SampleRegion{static_cast<double>(spec.out_w), static_cast<double>(spec.out_h)});

  std::vector<double> scores;
  if (mode == ScoringMode::kSampledFeatures) {
    const FeaturePair features = backbone_.forward(extract_patch(frame, spec));
    const SampledBatch batch =
        sample_batch(features, candidates, config_.sampler(), config_.threads);
    scores = classifier_.positive_scores(batch.sbrf1, batch.sbrf2);
  } else {
    std::vector<BBox> image_boxes;
    image_boxes.reserve(candidates.size());
    for (const BBox& c : candidates) image_boxes.push_back(map_box_to_image(c, spec));
    scores = raw_baseline_forward(image_boxes, frame, backbone_, classifier_,
                                  config_.sampler(), config_.L);
  }

  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  const std::size_t k = std::min<std::size_t>(order.size(), static_cast<std::size_t>(config_.top_k));
  BBox mean{0, 0, 0, 0};
  double confidence = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const BBox& b = candidates[order[i]];
    mean.x += b.x;
    mean.y += b.y;
    mean.w += b.w;
    mean.h += b.h;
    confidence += scores[order[i]];
  }
  const double inv = 1.0 / static_cast<double>(k);
  mean = {mean.x * inv, mean.y * inv, mean.w * inv, mean.h * inv};
  current_box_ = clamp_to_image(map_box_to_image(mean, spec), image_w, image_h);
  return {current_box_, confidence * inv};
}

void Tracker::update(const Tensor& frame, const BBox& estimated_box) {
  if (!initialized_) throw std::logic_error("update called before init");
  ++frame_index_;
  push_frame(collect_samples(frame, estimated_box, config_.update_pos, config_.update_neg));
  if (frame_index_ % config_.update_period == 0) {
    for (int it = 0; it < config_.update_iters; ++it) train_iteration();
  }
}

std::vector<FrameResult> track_sequence(std::span<const Tensor> frames,
                                        const BBox& gt_first,
                                        const TrackerConfig& config,
                                        ScoringMode mode) {
  if (frames.empty()) throw std::invalid_argument("track_sequence: empty sequence");
  using Clock = std::chrono::steady_clock;
  std::vector<FrameResult> results;
  results.reserve(frames.size());
  Tracker tracker(config);
  auto t0 = Clock::now();
  tracker.init(frames[0], gt_first);
  results.push_back({gt_first, 1.0,
                     std::chrono::duration<double, std::milli>(Clock::now() - t0).count()});
  for (std::size_t f = 1; f < frames.size(); ++f) {
    t0 = Clock::now();
    const Detection d = tracker.detect(frames[f], mode);
    tracker.update(frames[f], d.box);
    results.push_back({d.box, d.confidence,
                       std::chrono::duration<double, std::milli>(Clock::now() - t0).count()});
  }
  return results;
}

}  // namespace afsl
