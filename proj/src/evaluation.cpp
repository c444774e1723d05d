// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "afsl/harness.hpp"

namespace afsl {

EvalResult evaluate(std::span<const BBox> results, std::span<const BBox> gt,
                    std::span<const double> timings_ms) {
  if (results.size() != gt.size() || results.empty()) {
    throw std::invalid_argument("evaluate: " + std::to_string(results.size()) +
                                " results for " + std::to_string(gt.size()) +
                                " ground-truth boxes");
  }
  if (!timings_ms.empty() && timings_ms.size() != results.size()) {
    throw std::invalid_argument("evaluate: timings must be empty or one per frame");
  }
  const std::size_t n = results.size();
  std::vector<double> dist(n), overlap(n);
  for (std::size_t i = 0; i < n; ++i) {
    dist[i] = std::hypot(results[i].center_x() - gt[i].center_x(),
                         results[i].center_y() - gt[i].center_y());
    overlap[i] = iou(results[i], gt[i]);
  }
  EvalResult r;
  for (int t = 0; t < kPrecisionThresholds; ++t) {
    const auto hits = std::count_if(dist.begin(), dist.end(), [&](double d) { return d <= t; });
    r.precision_curve[static_cast<std::size_t>(t)] = static_cast<double>(hits) / n;
  }
  for (int s = 0; s < kSuccessThresholds; ++s) {
    const double threshold = s / 20.0;
    const auto hits = std::count_if(overlap.begin(), overlap.end(),
                                    [&](double o) { return o >= threshold; });
    r.success_curve[static_cast<std::size_t>(s)] = static_cast<double>(hits) / n;
  }
  r.precision_at_20 = r.precision_curve[20];
  r.auc = std::accumulate(r.success_curve.begin(), r.success_curve.end(), 0.0) / kSuccessThresholds;
  const double total_ms = std::accumulate(timings_ms.begin(), timings_ms.end(), 0.0);
  r.mean_fps = total_ms > 0 ? 1000.0 * static_cast<double>(n) / total_ms : 0.0;
  return r;
}

double analytic_flop_ratio(const TrackerConfig& config, int n_candidates) {
  if (n_candidates < 1) throw std::invalid_argument("analytic_flop_ratio: n_candidates < 1");
  const BackboneConfig bb{3, config.backbone_width};
  const ClassifierConfig head{config.fc1_width, config.fc2_width};
  const auto c = static_cast<std::size_t>(config.backbone_width);
  const auto p1 = static_cast<std::size_t>(config.sbrf1_h * config.sbrf1_w);
  const auto p2 = static_cast<std::size_t>(config.sbrf2_h * config.sbrf2_w);
  const double f_head = head_flops(c * p1, c * p2, head);
  const double f_sbr = sbr_flops(c, p1, c, p2);
  const double f_crop = backbone_flops(bb, config.L, config.L);
  // Patch size when the crop fits inside the image.
  const int patch = static_cast<int>(std::floor(config.L * config.r_c + 0.5));
  const double f_patch = backbone_flops(bb, patch, patch);
  const double n = n_candidates;
  return n * (f_crop + f_head) / (f_patch + n * (f_sbr + f_head));
}

namespace {

struct PathTiming {
  double fps = 0;
  double forwards_per_detect = 0;
};

PathTiming time_path(const Sequence& sequence, const TrackerConfig& config, ScoringMode mode) {
  using Clock = std::chrono::steady_clock;
  Tracker tracker(config);
  tracker.init(sequence.frames[0], sequence.gt[0]);
  std::vector<double> ms;
  std::uint64_t forwards = 0;
  for (std::size_t f = 1; f < sequence.size(); ++f) {
    tracker.backbone().reset_forward_count();
    const auto t0 = Clock::now();
    const Detection d = tracker.detect(sequence.frames[f], mode);
    forwards += tracker.backbone().forward_count();
    tracker.update(sequence.frames[f], d.box);
    ms.push_back(std::chrono::duration<double, std::milli>(Clock::now() - t0).count());
  }
  std::nth_element(ms.begin(), ms.begin() + static_cast<std::ptrdiff_t>(ms.size() / 2), ms.end());
  const double median = ms[ms.size() / 2];
  return {median > 0 ? 1000.0 / median : 0.0,
          static_cast<double>(forwards) / static_cast<double>(sequence.size() - 1)};
}

}  // namespace

SpeedReport speed_benchmark(const Sequence& sequence, TrackerConfig config, int n_candidates) {
  if (sequence.size() < 10) {
    throw std::invalid_argument("speed_benchmark needs at least 10 frames, got " +
                                std::to_string(sequence.size()));
  }
  config.n_candidates = n_candidates;
  config.validate();
  const PathTiming afsl = time_path(sequence, config, ScoringMode::kSampledFeatures);
  const PathTiming baseline = time_path(sequence, config, ScoringMode::kRawBaseline);
  SpeedReport r;
  r.n_candidates = n_candidates;
  r.afsl_fps = afsl.fps;
  r.baseline_fps = baseline.fps;
  r.speedup = baseline.fps > 0 ? afsl.fps / baseline.fps : 0.0;
  r.analytic_flop_ratio = analytic_flop_ratio(config, n_candidates);
  r.afsl_forwards_per_detect = afsl.forwards_per_detect;
  r.baseline_forwards_per_detect = baseline.forwards_per_detect;
  return r;
}

}  // namespace afsl
