// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_HARNESS_HPP_
#define AFSL_HARNESS_HPP_

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "afsl/geometry.hpp"
#include "afsl/tensor.hpp"
#include "afsl/tracker.hpp"

namespace afsl {

struct Sequence {
  std::vector<Tensor> frames;  // (3, H, W), values in [0, 1]
  std::vector<BBox> gt;
  std::string name;
  std::set<std::string> attributes;
  /// Occluder rectangle per frame for synthetic sequences, if any.
  std::vector<std::optional<BBox>> occluders;

  std::size_t size() const { return frames.size(); }
};

// ---- synthetic sequences ---------------------------------------------------

inline const std::set<std::string>& known_challenges() {
  static const std::set<std::string> tags{"illumination", "blur", "occlusion",
                                          "scale", "clutter"};
  return tags;
}

struct SyntheticOptions {
  int width = 320;
  int height = 240;
  int min_target = 36;
  int max_target = 56;
  int max_speed = 3;  // pixels per frame per axis
};

/// Textured target random-walking over a textured background. Each tag turns
/// on one perturbation: illumination (global gain ramp), blur (box blur
/// bursts), occlusion (occluder sweeping across the target), scale (smooth
/// size drift), clutter (high-frequency background). Unknown tags throw.
Sequence generate_synthetic_sequence(std::uint64_t seed, int n_frames,
                                     const std::set<std::string>& challenges,
                                     const SyntheticOptions& options = {});

/// Parses "a,b,c" into a tag set ("" or "none" is empty).
std::set<std::string> parse_challenges(const std::string& list);

// ---- image and sequence files ------------------------------------------------

/// Binary PPM (P6) or PGM (P5) with maxval 255; grey images are expanded to
/// three identical channels.
Tensor read_image(const std::filesystem::path& path);
/// Writes a (3, H, W) tensor as P6 (values clamped to [0, 1]).
void write_ppm(const std::filesystem::path& path, const Tensor& image);

/// Images from `dir/img/` (or `dir/` itself) in lexicographic order, boxes
/// from groundtruth_rect.txt or groundtruth.txt.
Sequence load_otb_sequence(const std::filesystem::path& dir);
/// Boxes, one "x,y,w,h" line each; comma and/or whitespace separated.
std::vector<BBox> read_groundtruth(const std::filesystem::path& path);
/// Writes img/NNNN.ppm, groundtruth_rect.txt and attributes.txt.
void write_sequence(const Sequence& sequence, const std::filesystem::path& dir);

// ---- one-pass evaluation -----------------------------------------------------

inline constexpr int kPrecisionThresholds = 51;  // 0..50 px
inline constexpr int kSuccessThresholds = 21;    // 0..1 step 0.05

struct EvalResult {
  std::array<double, kPrecisionThresholds> precision_curve{};
  std::array<double, kSuccessThresholds> success_curve{};
  double precision_at_20 = 0;
  double auc = 0;
  double mean_fps = 0;  // 0 when no timings are given
};

/// `timings_ms` is empty or one entry per frame.
EvalResult evaluate(std::span<const BBox> results, std::span<const BBox> gt,
                    std::span<const double> timings_ms = {});

// ---- speed benchmark ---------------------------------------------------------

struct SpeedReport {
  int n_candidates = 0;
  double afsl_fps = 0;      // median over frames 2..N
  double baseline_fps = 0;
  double speedup = 0;
  double analytic_flop_ratio = 0;
  double afsl_forwards_per_detect = 0;  // backbone passes inside detect
  double baseline_forwards_per_detect = 0;
};

/// Analytic FLOP ratio of per-candidate crops over one shared pass.
double analytic_flop_ratio(const TrackerConfig& config, int n_candidates);

/// Runs the sequence once per scoring path with the same seeds.
SpeedReport speed_benchmark(const Sequence& sequence, TrackerConfig config,
                            int n_candidates);

// ---- config files ------------------------------------------------------------

/// Applies `key = value` lines ('#' starts a comment) on top of `base`.
/// Unknown keys and malformed values throw with the key and line number.
TrackerConfig parse_config(const std::string& text, TrackerConfig base);
TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base);
/// Every field, in a form parse_config reads back exactly.
std::string format_config(const TrackerConfig& config);

}  // namespace afsl

#endif  // AFSL_HARNESS_HPP_
