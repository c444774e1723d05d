// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "afsl/harness.hpp"
#include "afsl/tracker.hpp"

namespace afsl {
namespace {

namespace fs = std::filesystem;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("afsl_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& path, const std::string& text) { std::ofstream(path) << text; }

std::string error_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    return e.what();
  }
  return "";
}

// Pixels of `image` under an integer-aligned 1-based box.
Tensor region(const Tensor& image, const BBox& b) {
  const auto w = static_cast<std::size_t>(b.w), h = static_cast<std::size_t>(b.h);
  Tensor out({3, h, w});
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        out.at(c, y, x) = image.at(c, static_cast<std::size_t>(b.y) - 1 + y, static_cast<std::size_t>(b.x) - 1 + x);
      }
    }
  }
  return out;
}

double overlap_area(const BBox& a, const BBox& b) {
  const double ix = std::max(0.0, std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y));
  return ix * iy;
}

// ---- synthetic sequences ------------------------------------------------------------------

TEST(Synthetic, SameSeedIsBitIdentical) {
  const Sequence a = generate_synthetic_sequence(3, 12, {"blur", "scale", "clutter"});
  const Sequence b = generate_synthetic_sequence(3, 12, {"blur", "scale", "clutter"});
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.gt, b.gt);
  const Sequence c = generate_synthetic_sequence(4, 12, {"blur", "scale", "clutter"});
  EXPECT_NE(a.frames, c.frames);
}

TEST(Synthetic, NoChallengesMeansConstantAppearance) {
  const Sequence s = generate_synthetic_sequence(8, 40, {});
  ASSERT_EQ(s.frames.size(), 40u);
  ASSERT_EQ(s.gt.size(), 40u);
  const Tensor first = region(s.frames[0], s.gt[0]);
  bool moved = false;
  for (std::size_t t = 1; t < s.size(); ++t) {
    EXPECT_EQ(region(s.frames[t], s.gt[t]), first) << "frame " << t + 1;
    moved = moved || s.gt[t].x != s.gt[0].x || s.gt[t].y != s.gt[0].y;
  }
  EXPECT_TRUE(moved);
}

TEST(Synthetic, GroundTruthInsideFrames) {
  const Sequence s = generate_synthetic_sequence(9, 80, {"scale", "occlusion"});
  for (std::size_t t = 0; t < s.size(); ++t) {
    const auto W = static_cast<double>(s.frames[t].dim(2)), H = static_cast<double>(s.frames[t].dim(1));
    EXPECT_GE(s.gt[t].x, 1);
    EXPECT_GE(s.gt[t].y, 1);
    EXPECT_LE(s.gt[t].x + s.gt[t].w - 1, W);
    EXPECT_LE(s.gt[t].y + s.gt[t].h - 1, H);
  }
}

TEST(Synthetic, OcclusionCoversAtLeastThirtyPercent) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Sequence s = generate_synthetic_sequence(seed, 60, {"occlusion"});
    double best = 0;
    for (std::size_t t = 0; t < s.size(); ++t) {
      if (s.occluders[t]) best = std::max(best, overlap_area(*s.occluders[t], s.gt[t]) / s.gt[t].area());
    }
    EXPECT_GE(best, 0.3) << "seed " << seed;
  }
}

TEST(Synthetic, ScaleAndIlluminationPerturb) {
  const Sequence scaled = generate_synthetic_sequence(2, 40, {"scale"});
  double min_w = 1e9, max_w = 0;
  for (const BBox& b : scaled.gt) {
    min_w = std::min(min_w, b.w);
    max_w = std::max(max_w, b.w);
  }
  EXPECT_GT(max_w, min_w);
  const Sequence lit = generate_synthetic_sequence(2, 40, {"illumination"});
  auto mean = [](const Tensor& t) {
    double s = 0;
    for (Scalar v : t.values()) s += v;
    return s / static_cast<double>(t.size());
  };
  EXPECT_LT(mean(lit.frames[20]), 0.8 * mean(lit.frames[0]));
}

TEST(Synthetic, RejectsUnknownChallengeAndEmpty) {
  EXPECT_THROW(generate_synthetic_sequence(1, 5, {"fog"}), std::invalid_argument);
  EXPECT_THROW(generate_synthetic_sequence(1, 0, {}), std::invalid_argument);
  EXPECT_EQ(parse_challenges("blur,scale"), (std::set<std::string>{"blur", "scale"}));
  EXPECT_TRUE(parse_challenges("none").empty());
}

// ---- sequence files ----------------------------------------------------------------------

void write_frames(const fs::path& dir, int n) {
  fs::create_directories(dir / "img");
  for (int i = 1; i <= n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "%04d.ppm", i);
    write_ppm(dir / "img" / name, Tensor({3, 8, 10}, 0.2 * i));
  }
}

TEST(OtbLoader, CommaSeparated) {
  const fs::path dir = fresh_dir("otb_comma");
  write_frames(dir, 3);
  write_text(dir / "groundtruth_rect.txt", "10,20,30,40\n10,20,30,40\n10,20,30,40\n");
  const Sequence s = load_otb_sequence(dir);
  ASSERT_EQ(s.size(), 3u);
  for (const BBox& b : s.gt) EXPECT_EQ(b, (BBox{10, 20, 30, 40}));
  EXPECT_EQ(s.frames[1].dims(), (Shape{3, 8, 10}));
  EXPECT_NEAR(s.frames[1][0], 0.4, 1.0 / 255);
}

TEST(OtbLoader, TabSeparated) {
  const fs::path dir = fresh_dir("otb_tab");
  write_frames(dir, 2);
  write_text(dir / "groundtruth.txt", "10\t20\t30\t40\n1 2, 3 4\n");
  const Sequence s = load_otb_sequence(dir);
  EXPECT_EQ(s.gt[0], (BBox{10, 20, 30, 40}));
  EXPECT_EQ(s.gt[1], (BBox{1, 2, 3, 4}));
}

TEST(OtbLoader, CountMismatchNamesBothCounts) {
  const fs::path dir = fresh_dir("otb_mismatch");
  write_frames(dir, 3);
  write_text(dir / "groundtruth_rect.txt", "10,20,30,40\n10,20,30,40\n");
  const std::string msg = error_of([&] { load_otb_sequence(dir); });
  EXPECT_NE(msg.find("3 frames"), std::string::npos) << msg;
  EXPECT_NE(msg.find("2 ground-truth"), std::string::npos) << msg;
}

TEST(OtbLoader, BadLineNamesTheLine) {
  const fs::path dir = fresh_dir("otb_badline");
  write_text(dir / "gt.txt", "10,20,30,40\n10,20,thirty\n");
  const std::string msg = error_of([&] { read_groundtruth(dir / "gt.txt"); });
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(OtbLoader, WrittenSyntheticSequenceReadsBackExactly) {
  const Sequence s = generate_synthetic_sequence(6, 4, {"clutter"});
  const fs::path dir = fresh_dir("otb_roundtrip");
  write_sequence(s, dir);
  const Sequence r = load_otb_sequence(dir);
  EXPECT_EQ(r.frames, s.frames);
  EXPECT_EQ(r.gt, s.gt);
}

TEST(ImageIo, GreyscaleExpandsToThreeChannels) {
  const fs::path dir = fresh_dir("pgm");
  std::ofstream(dir / "a.pgm", std::ios::binary) << "P5\n# comment\n2 1\n255\n" << '\x00' << '\xff';
  const Tensor img = read_image(dir / "a.pgm");
  EXPECT_EQ(img.dims(), (Shape{3, 1, 2}));
  EXPECT_EQ(img.at(2, 0, 1), 1.0);
  EXPECT_EQ(img.at(1, 0, 0), 0.0);
}

// ---- evaluation ----------------------------------------------------------------------------

TEST(Evaluate, PerfectTracking) {
  const std::vector<BBox> gt{{1, 1, 10, 10}, {5, 6, 20, 30}, {9, 9, 3, 4}};
  const EvalResult r = evaluate(gt, gt);
  for (double v : r.precision_curve) EXPECT_EQ(v, 1);
  for (double v : r.success_curve) EXPECT_EQ(v, 1);
  EXPECT_EQ(r.auc, 1);
  EXPECT_EQ(r.precision_at_20, 1);
  EXPECT_EQ(r.mean_fps, 0);
}

TEST(Evaluate, ShiftStepsAtTheExactDistance) {
  std::vector<BBox> gt, res;
  for (int i = 0; i < 5; ++i) {
    gt.push_back({100.0 + i, 50, 40, 30});
    res.push_back({125.0 + i, 50, 40, 30});
  }
  const EvalResult r = evaluate(res, gt);
  EXPECT_EQ(r.precision_at_20, 0);
  EXPECT_EQ(r.precision_curve[24], 0);
  EXPECT_EQ(r.precision_curve[25], 1);
}

TEST(Evaluate, SuccessCrossesAtOneSeventh) {
  const std::vector<BBox> gt(4, BBox{0, 0, 2, 2}), res(4, BBox{1, 1, 2, 2});
  const EvalResult r = evaluate(res, gt);
  EXPECT_EQ(r.success_curve[2], 1);  // 0.10
  EXPECT_EQ(r.success_curve[3], 0);  // 0.15
  EXPECT_NEAR(r.auc, 3.0 / 21.0, 1e-15);
}

TEST(Evaluate, FpsFromTimings) {
  const std::vector<BBox> gt(4, BBox{0, 0, 2, 2});
  const std::vector<double> ms{10, 10, 10, 10};
  EXPECT_NEAR(evaluate(gt, gt, ms).mean_fps, 100, 1e-12);
}

TEST(Evaluate, RejectsMismatchedLengths) {
  const std::vector<BBox> a(3), b(2);
  EXPECT_THROW(evaluate(a, b), std::invalid_argument);
  EXPECT_THROW(evaluate(std::vector<BBox>{}, std::vector<BBox>{}), std::invalid_argument);
}

TEST(Evaluate, CurvesMonotoneOnRandomPairs) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BBox> gt, res;
    for (int i = 0; i < 30; ++i) {
      gt.push_back({100 * u(rng), 100 * u(rng), 5 + 40 * u(rng), 5 + 40 * u(rng)});
      res.push_back({gt.back().x + 60 * (u(rng) - 0.5), gt.back().y + 60 * (u(rng) - 0.5), 5 + 40 * u(rng),
                     5 + 40 * u(rng)});
    }
    const EvalResult r = evaluate(res, gt);
    for (std::size_t i = 1; i < r.precision_curve.size(); ++i) {
      ASSERT_GE(r.precision_curve[i], r.precision_curve[i - 1]);
    }
    for (std::size_t i = 1; i < r.success_curve.size(); ++i) {
      ASSERT_LE(r.success_curve[i], r.success_curve[i - 1]);
    }
    for (double v : r.precision_curve) ASSERT_TRUE(v >= 0 && v <= 1);
    ASSERT_TRUE(r.auc >= 0 && r.auc <= 1);
  }
}

// ---- config files --------------------------------------------------------------------------

TEST(ConfigFile, RoundTripEveryField) {
  TrackerConfig c = TrackerConfig::paper();
  c.r_c = 1.7;
  c.sbrf2_h = 10;
  c.swap_levels = true;
  c.g_opt.learning_rate = 3.5e-5;
  c.d_opt.weight_decay = 0.001;
  c.seed = 12345678901234ULL;
  c.cand_trans_sigma = 0.1 + 1e-12;
  const std::string text = format_config(c);
  const TrackerConfig back = parse_config(text, TrackerConfig{});
  EXPECT_EQ(format_config(back), text);
  EXPECT_EQ(back.r_c, 1.7);
  EXPECT_EQ(back.seed, 12345678901234ULL);
  EXPECT_EQ(back.cand_trans_sigma, c.cand_trans_sigma);
  EXPECT_TRUE(back.swap_levels);
}

TEST(ConfigFile, CommentsAndOverlay) {
  const TrackerConfig c = parse_config("# tuned\nr_c = 1.5  # wider\n\nn_candidates=64\n", TrackerConfig::paper());
  EXPECT_EQ(c.r_c, 1.5);
  EXPECT_EQ(c.n_candidates, 64);
  EXPECT_EQ(c.init_iters, 60);
}

TEST(ConfigFile, UnknownKeyNamed) {
  const std::string msg = error_of([] { parse_config("r_c = 1.2\nbogus_knob = 3\n", {}); });
  EXPECT_NE(msg.find("bogus_knob"), std::string::npos) << msg;
  EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
}

TEST(ConfigFile, BadValueAndInvalidConfigRejected) {
  EXPECT_THROW(parse_config("init_iters = many\n", {}), std::invalid_argument);
  EXPECT_THROW(parse_config("pos_iou = 0.2\n", {}), std::invalid_argument);
}

// ---- speed ------------------------------------------------------------------------------------

TEST(Speed, AnalyticRatioStrictlyIncreasing) {
  for (const TrackerConfig& c : {TrackerConfig::paper(), TrackerConfig::harness_default()}) {
    double prev = 0;
    for (int n : {1, 16, 64, 256}) {
      const double r = analytic_flop_ratio(c, n);
      EXPECT_GT(r, prev);
      prev = r;
    }
  }
  EXPECT_GE(analytic_flop_ratio(TrackerConfig::paper(), 256), 10);
}

TEST(Speed, BenchmarkCountsForwards) {
  TrackerConfig c = TrackerConfig::harness_default();
  c.backbone_width = 8;
  c.fc1_width = 16;
  c.fc2_width = 16;
  c.g_hidden = 8;
  c.init_iters = 2;
  c.update_iters = 1;
  c.init_pos = 30;
  c.init_neg = 100;
  c.update_pos = 5;
  c.update_neg = 20;
  c.batch_pos = 4;
  c.batch_neg = 8;
  c.neg_pool = 32;
  const Sequence seq = generate_synthetic_sequence(1, 10, {});
  const SpeedReport r = speed_benchmark(seq, c, 16);
  EXPECT_EQ(r.n_candidates, 16);
  EXPECT_EQ(r.afsl_forwards_per_detect, 1);
  EXPECT_EQ(r.baseline_forwards_per_detect, 16);
  EXPECT_GT(r.afsl_fps, 0);
  EXPECT_GT(r.baseline_fps, 0);
  EXPECT_DOUBLE_EQ(r.speedup, r.afsl_fps / r.baseline_fps);
  EXPECT_THROW(speed_benchmark(generate_synthetic_sequence(1, 9, {}), c, 16), std::invalid_argument);
}

// With pointwise (centre-tap) convolutions, unit scale and a box on the
// stride-16 lattice, the shared-pass features under the box equal the
// features of the box's own crop, so both scoring paths agree exactly. The
// level-2 grid is 4x4 so every sample lands on a cell centre inside the box;
// an 8x8 grid over 8 cells would read the neighbouring cell at the border,
// which is real context in the shared patch but padding in the crop.
TEST(Speed, BothPathsScoreIdenticallyOnAlignedFixture) {
  TrackerConfig c = TrackerConfig::harness_default();
  c.L = 128;
  c.r_c = 2.0;
  c.backbone_width = 8;
  c.fc1_width = 16;
  c.fc2_width = 16;
  c.g_hidden = 8;
  c.init_iters = 3;
  c.init_pos = 30;
  c.init_neg = 100;
  c.batch_pos = 4;
  c.batch_neg = 8;
  c.neg_pool = 32;
  c.sbrf2_h = 4;
  c.sbrf2_w = 4;
  c.n_candidates = 8;
  c.cand_trans_sigma = 0;
  c.cand_scale_sigma = 0;

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  Tensor frame({3, 320, 320});
  for (Scalar& v : frame.values()) v = std::floor(255 * u(rng)) / 255;
  const BBox box{97, 97, 128, 128};  // crop origin (33, 33), box at patch (64, 64)

  auto make = [&] {
    auto t = std::make_unique<Tracker>(c);
    for (LayerParams& g : t->backbone().groups()) {
      Tensor& w = g.weights;
      for (std::size_t o = 0; o < w.dim(0); ++o) {
        for (std::size_t i = 0; i < w.dim(1); ++i) {
          for (std::size_t k = 0; k < 9; ++k) {
            if (k != 4) w.at(o, i, k / 3, k % 3) = 0;
          }
        }
      }
    }
    t->init(frame, box);
    return t;
  };
  auto shared = make();
  auto raw = make();
  const Detection a = shared->detect(frame, ScoringMode::kSampledFeatures);
  const Detection b = raw->detect(frame, ScoringMode::kRawBaseline);
  EXPECT_EQ(a.box, b.box);
  EXPECT_NEAR(a.confidence, b.confidence, 1e-12);
  EXPECT_GT(std::abs(a.confidence - 0.5), 1e-6);  // the head is not trivially flat
}

}  // namespace
}  // namespace afsl
