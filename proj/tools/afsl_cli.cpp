// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: synthetic data, tracking, evaluation, speed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "afsl/harness.hpp"
#include "afsl/tracker.hpp"

namespace {

using afsl::BBox;

std::string fixed(double v, int digits) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", digits, v);
  return buf.data();
}

void write_results(const std::string& path, const std::vector<afsl::FrameResult>& results,
                   bool timing) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << "frame,x,y,w,h,confidence,ms\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const afsl::FrameResult& r = results[i];
    os << i + 1 << ',' << fixed(r.box.x, 4) << ',' << fixed(r.box.y, 4) << ','
       << fixed(r.box.w, 4) << ',' << fixed(r.box.h, 4) << ',' << fixed(r.confidence, 6)
       << ',' << fixed(timing ? r.ms : 0.0, 3) << '\n';
  }
}

struct ResultsFile {
  std::vector<BBox> boxes;
  std::vector<double> ms;
};

ResultsFile read_results(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  ResultsFile out;
  std::string line;
  std::getline(is, line);  // header
  for (int line_no = 2; std::getline(is, line); ++line_no) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double frame = 0, x = 0, y = 0, w = 0, h = 0, conf = 0, ms = 0;
    if (!(fields >> frame >> x >> y >> w >> h >> conf >> ms)) {
      throw std::runtime_error(path + " line " + std::to_string(line_no) + ": malformed row");
    }
    out.boxes.push_back({x, y, w, h});
    out.ms.push_back(ms);
  }
  return out;
}

afsl::TrackerConfig make_config(const std::string& config_path, bool paper, std::uint64_t seed) {
  afsl::TrackerConfig base =
      paper ? afsl::TrackerConfig::paper() : afsl::TrackerConfig::harness_default();
  base.seed = seed;
  if (!config_path.empty()) base = afsl::load_config(config_path, base);
  base.validate();
  return base;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial feature sampling tracker"};
  app.require_subcommand(1);

  // synth
  std::uint64_t synth_seed = 0;
  int synth_frames = 100;
  std::string synth_challenges, synth_size = "320x240", synth_out;
  CLI::App* synth = app.add_subcommand("synth", "Write a synthetic sequence");
  synth->add_option("--seed", synth_seed, "Generator seed")->required();
  synth->add_option("--frames", synth_frames, "Number of frames")->check(CLI::PositiveNumber);
  synth->add_option("--challenges", synth_challenges,
                    "Comma list of illumination,blur,occlusion,scale,clutter");
  synth->add_option("--size", synth_size, "Frame size WxH");
  synth->add_option("--out", synth_out, "Output directory")->required();

  // track
  std::string track_seq, track_config, track_out;
  bool track_paper = false, track_timing = false, track_baseline = false, track_no_g = false;
  std::uint64_t track_seed = 1;
  CLI::App* track = app.add_subcommand("track", "Track a sequence from its first box");
  track->add_option("--seq", track_seq, "Sequence directory")->required();
  track->add_option("--config", track_config, "key = value config file");
  track->add_flag("--paper-config", track_paper, "Start from the published settings");
  track->add_option("--seed", track_seed, "Tracker seed");
  track->add_option("--out", track_out, "Results CSV")->required();
  track->add_flag("--timing", track_timing,
                  "Write measured per-frame ms; without it the ms column is 0 and output is reproducible");
  track->add_flag("--baseline", track_baseline, "Score candidates by per-box crops");
  track->add_flag("--no-generator", track_no_g, "Disable the mask generator");

  // eval
  std::string eval_results, eval_seq, eval_out;
  CLI::App* eval = app.add_subcommand("eval", "One-pass evaluation of a results CSV");
  eval->add_option("--results", eval_results, "Results CSV")->required();
  eval->add_option("--seq", eval_seq, "Sequence directory")->required();
  eval->add_option("--out", eval_out, "Report file")->required();

  // bench-speed
  std::string bench_seq, bench_config, bench_out;
  int bench_candidates = 256;
  CLI::App* bench = app.add_subcommand("bench-speed", "Shared pass vs per-candidate crops");
  bench->add_option("--seq", bench_seq, "Sequence directory")->required();
  bench->add_option("--candidates", bench_candidates, "Candidates per frame")
      ->check(CLI::PositiveNumber);
  bench->add_option("--config", bench_config, "key = value config file");
  bool bench_paper = false;
  bench->add_flag("--paper-config", bench_paper, "Start from the published settings");
  bench->add_option("--out", bench_out, "Report file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      afsl::SyntheticOptions options;
      char x = 0;
      std::istringstream size(synth_size);
      if (!(size >> options.width >> x >> options.height) || x != 'x') {
        throw std::invalid_argument("--size must look like 320x240");
      }
      const afsl::Sequence seq = afsl::generate_synthetic_sequence(
          synth_seed, synth_frames, afsl::parse_challenges(synth_challenges), options);
      afsl::write_sequence(seq, synth_out);
    } else if (*track) {
      afsl::TrackerConfig config = make_config(track_config, track_paper, track_seed);
      if (track_no_g) config.use_generator = false;
      const afsl::Sequence seq = afsl::load_otb_sequence(track_seq);
      const auto results = afsl::track_sequence(
          seq.frames, seq.gt.front(), config,
          track_baseline ? afsl::ScoringMode::kRawBaseline : afsl::ScoringMode::kSampledFeatures);
      write_results(track_out, results, track_timing);
    } else if (*eval) {
      const afsl::Sequence seq = afsl::load_otb_sequence(eval_seq);
      const ResultsFile res = read_results(eval_results);
      const afsl::EvalResult r = afsl::evaluate(res.boxes, seq.gt, res.ms);
      std::ofstream os(eval_out);
      os << "sequence," << seq.name << "\n";
      os << "precision_at_20," << fixed(r.precision_at_20, 6) << "\n";
      os << "auc," << fixed(r.auc, 6) << "\n";
      os << "mean_fps," << fixed(r.mean_fps, 3) << "\n";
      os << "\nthreshold_px,precision\n";
      for (std::size_t t = 0; t < r.precision_curve.size(); ++t) {
        os << t << ',' << fixed(r.precision_curve[t], 6) << "\n";
      }
      os << "\noverlap,success\n";
      for (std::size_t s = 0; s < r.success_curve.size(); ++s) {
        os << fixed(static_cast<double>(s) / 20.0, 2) << ',' << fixed(r.success_curve[s], 6) << "\n";
      }
      std::cout << "precision@20 " << fixed(r.precision_at_20, 4) << "  auc "
                << fixed(r.auc, 4) << "  fps " << fixed(r.mean_fps, 2) << "\n";
    } else if (*bench) {
      const afsl::TrackerConfig config = make_config(bench_config, bench_paper, 1);
      const afsl::Sequence seq = afsl::load_otb_sequence(bench_seq);
      const afsl::SpeedReport r = afsl::speed_benchmark(seq, config, bench_candidates);
      std::ofstream os(bench_out);
      os << "n_candidates," << r.n_candidates << "\n";
      os << "afsl_fps," << fixed(r.afsl_fps, 3) << "\n";
      os << "baseline_fps," << fixed(r.baseline_fps, 3) << "\n";
      os << "speedup," << fixed(r.speedup, 3) << "\n";
      os << "analytic_flop_ratio," << fixed(r.analytic_flop_ratio, 3) << "\n";
      os << "afsl_backbone_passes_per_detect," << fixed(r.afsl_forwards_per_detect, 3) << "\n";
      os << "baseline_backbone_passes_per_detect," << fixed(r.baseline_forwards_per_detect, 3)
         << "\n";
      std::cout << "speedup " << fixed(r.speedup, 2) << "x  flop ratio "
                << fixed(r.analytic_flop_ratio, 2) << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
