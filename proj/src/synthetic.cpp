// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "afsl/harness.hpp"

namespace afsl {

namespace {

using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

struct Wave {
  double fx, fy, phase, amp;
};

// Smooth colour field plus a few soft blobs; `clutter` adds a
// high-contrast fine checker and high-frequency waves.
Tensor make_background(Rng& rng, int width, int height, bool clutter) {
  const auto w = static_cast<std::size_t>(width), h = static_cast<std::size_t>(height);
  Tensor bg({3, h, w});
  for (std::size_t c = 0; c < 3; ++c) {
    const double base = uniform(rng, 0.3, 0.6);
    std::vector<Wave> waves(5);
    for (Wave& wv : waves) {
      wv = {uniform(rng, -0.05, 0.05), uniform(rng, -0.05, 0.05),
            uniform(rng, 0, 2 * std::numbers::pi), uniform(rng, 0.03, 0.08)};
    }
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        double v = base;
        for (const Wave& wv : waves) {
          v += wv.amp * std::sin(2 * std::numbers::pi * (wv.fx * x + wv.fy * y) + wv.phase);
        }
        bg.at(c, y, x) = v;
      }
    }
  }
  for (int b = 0; b < 8; ++b) {
    const double cx = uniform(rng, 0, width), cy = uniform(rng, 0, height);
    const double r = uniform(rng, 10, 40);
    const std::array<double, 3> tint{uniform(rng, -0.15, 0.15), uniform(rng, -0.15, 0.15),
                                     uniform(rng, -0.15, 0.15)};
    for (std::size_t y = 0; y < h; ++y) {
      for (std::size_t x = 0; x < w; ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double weight = std::exp(-d2 / (2 * r * r));
        for (std::size_t c = 0; c < 3; ++c) bg.at(c, y, x) += tint[c] * weight;
      }
    }
  }
  if (clutter) {
    const int cell = uniform_int(rng, 3, 5);
    std::vector<Wave> waves(3);
    for (Wave& wv : waves) {
      wv = {uniform(rng, 0.15, 0.35), uniform(rng, 0.15, 0.35),
            uniform(rng, 0, 2 * std::numbers::pi), 0.08};
    }
    for (std::size_t c = 0; c < 3; ++c) {
      for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
          const bool odd = ((x / cell) + (y / cell)) % 2 == 1;
          double v = odd ? 0.15 : -0.15;
          for (const Wave& wv : waves) {
            v += wv.amp * std::sin(2 * std::numbers::pi * (wv.fx * x + wv.fy * y) + wv.phase + c);
          }
          bg.at(c, y, x) += v;
        }
      }
    }
  }
  return bg;
}

// Target appearance: two saturated colours in a checker with a diagonal
// band and a dark frame.
Tensor make_target_texture(Rng& rng, int width, int height) {
  const auto w = static_cast<std::size_t>(width), h = static_cast<std::size_t>(height);
  std::array<double, 3> a{}, b{};
  for (std::size_t c = 0; c < 3; ++c) {
    a[c] = uniform(rng, 0, 1) < 0.5 ? uniform(rng, 0.0, 0.2) : uniform(rng, 0.8, 1.0);
    b[c] = 1.0 - a[c];
  }
  const double cell = std::max(4.0, std::min(width, height) / uniform(rng, 3.0, 5.0));
  Tensor tex({3, h, w});
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const bool odd = (static_cast<int>(x / cell) + static_cast<int>(y / cell)) % 2 == 1;
      const bool band = std::abs(static_cast<double>(x) / w - static_cast<double>(y) / h) < 0.12;
      const bool border = x < 2 || y < 2 || x + 2 >= w || y + 2 >= h;
      for (std::size_t c = 0; c < 3; ++c) {
        double v = odd ? a[c] : b[c];
        if (band) v = 0.5 * v + 0.5;
        if (border) v = 0.05;
        tex.at(c, y, x) = v;
      }
    }
  }
  return tex;
}

// Bilinear resize with pixel-centre alignment.
Tensor resize(const Tensor& src, int width, int height) {
  const auto sh = static_cast<double>(src.dim(1)), sw = static_cast<double>(src.dim(2));
  Tensor out({src.dim(0), static_cast<std::size_t>(height), static_cast<std::size_t>(width)});
  for (std::size_t c = 0; c < src.dim(0); ++c) {
    for (int y = 0; y < height; ++y) {
      const double v = std::clamp((y + 0.5) * sh / height - 0.5, 0.0, sh - 1);
      const auto y0 = static_cast<std::size_t>(v);
      const std::size_t y1 = std::min(y0 + 1, src.dim(1) - 1);
      const double fy = v - y0;
      for (int x = 0; x < width; ++x) {
        const double u = std::clamp((x + 0.5) * sw / width - 0.5, 0.0, sw - 1);
        const auto x0 = static_cast<std::size_t>(u);
        const std::size_t x1 = std::min(x0 + 1, src.dim(2) - 1);
        const double fx = u - x0;
        const double top = src.at(c, y0, x0) * (1 - fx) + src.at(c, y0, x1) * fx;
        const double bot = src.at(c, y1, x0) * (1 - fx) + src.at(c, y1, x1) * fx;
        out.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) =
            top * (1 - fy) + bot * fy;
      }
    }
  }
  return out;
}

// Pastes `src` with its top-left pixel at 0-based (x0, y0), clipped.
void paste(Tensor& frame, const Tensor& src, int x0, int y0) {
  const int fh = static_cast<int>(frame.dim(1)), fw = static_cast<int>(frame.dim(2));
  const int sh = static_cast<int>(src.dim(1)), sw = static_cast<int>(src.dim(2));
  for (std::size_t c = 0; c < 3; ++c) {
    for (int y = std::max(0, -y0); y < sh && y0 + y < fh; ++y) {
      for (int x = std::max(0, -x0); x < sw && x0 + x < fw; ++x) {
        frame.at(c, static_cast<std::size_t>(y0 + y), static_cast<std::size_t>(x0 + x)) =
            src.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x));
      }
    }
  }
}

// Separable box blur with edge replication.
void box_blur(Tensor& frame, int radius) {
  const int h = static_cast<int>(frame.dim(1)), w = static_cast<int>(frame.dim(2));
  const double inv = 1.0 / (2 * radius + 1);
  std::vector<double> line;
  for (std::size_t c = 0; c < frame.dim(0); ++c) {
    line.resize(static_cast<std::size_t>(w));
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        double s = 0;
        for (int k = -radius; k <= radius; ++k) {
          s += frame.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(std::clamp(x + k, 0, w - 1)));
        }
        line[static_cast<std::size_t>(x)] = s * inv;
      }
      for (int x = 0; x < w; ++x) {
        frame.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = line[static_cast<std::size_t>(x)];
      }
    }
    line.resize(static_cast<std::size_t>(h));
    for (int x = 0; x < w; ++x) {
      for (int y = 0; y < h; ++y) {
        double s = 0;
        for (int k = -radius; k <= radius; ++k) {
          s += frame.at(c, static_cast<std::size_t>(std::clamp(y + k, 0, h - 1)), static_cast<std::size_t>(x));
        }
        line[static_cast<std::size_t>(y)] = s * inv;
      }
      for (int y = 0; y < h; ++y) {
        frame.at(c, static_cast<std::size_t>(y), static_cast<std::size_t>(x)) = line[static_cast<std::size_t>(y)];
      }
    }
  }
}

}  // namespace

std::set<std::string> parse_challenges(const std::string& list) {
  std::set<std::string> tags;
  std::stringstream ss(list);
  std::string tag;
  while (std::getline(ss, tag, ',')) {
    tag.erase(0, tag.find_first_not_of(" \t"));
    tag.erase(tag.find_last_not_of(" \t") + 1);
    if (tag.empty() || tag == "none") continue;
    if (!known_challenges().contains(tag)) {
      throw std::invalid_argument("unknown challenge '" + tag + "'");
    }
    tags.insert(tag);
  }
  return tags;
}

Sequence generate_synthetic_sequence(std::uint64_t seed, int n_frames,
                                     const std::set<std::string>& challenges,
                                     const SyntheticOptions& options) {
  if (n_frames < 1) throw std::invalid_argument("synthetic sequence needs >= 1 frame");
  for (const std::string& tag : challenges) {
    if (!known_challenges().contains(tag)) {
      throw std::invalid_argument("unknown challenge '" + tag + "'");
    }
  }
  const int W = options.width, H = options.height;
  if (W < 2 * options.max_target || H < 2 * options.max_target ||
      options.min_target < 8 || options.min_target > options.max_target) {
    throw std::invalid_argument("synthetic sequence: frame too small for the target size range");
  }
  const bool illumination = challenges.contains("illumination");
  const bool blur = challenges.contains("blur");
  const bool occlusion = challenges.contains("occlusion");
  const bool scale = challenges.contains("scale");
  const bool clutter = challenges.contains("clutter");

  Rng rng(seed);
  const Tensor background = make_background(rng, W, H, clutter);
  const int tw0 = uniform_int(rng, options.min_target, options.max_target);
  const int th0 = uniform_int(rng, options.min_target, options.max_target);
  // Under scale drift the texture is drawn larger and resampled per frame.
  const double max_scale = 1.3;
  const Tensor texture = scale ? make_target_texture(rng, static_cast<int>(tw0 * max_scale),
                                                     static_cast<int>(th0 * max_scale))
                               : make_target_texture(rng, tw0, th0);
  const Tensor occluder_texture = make_target_texture(rng, 8, 8);
  const double scale_phase = uniform(rng, 0, 2 * std::numbers::pi);

  // Centre in 0-based pixel units; stays integral.
  int cx = uniform_int(rng, W / 4, 3 * W / 4);
  int cy = uniform_int(rng, H / 4, 3 * H / 4);
  int vx = uniform_int(rng, -1, 1), vy = uniform_int(rng, -1, 1);

  const int occ_len = std::max(9, n_frames / 4) | 1;  // odd: one frame at mid-sweep
  const int occ_start = std::max(1, n_frames / 3);

  Sequence seq;
  seq.name = "synthetic-" + std::to_string(seed);
  seq.attributes = challenges;
  for (int t = 0; t < n_frames; ++t) {
    if (t > 0) {
      std::bernoulli_distribution change(0.3);
      if (change(rng)) vx += uniform_int(rng, 0, 1) == 0 ? -1 : 1;
      if (change(rng)) vy += uniform_int(rng, 0, 1) == 0 ? -1 : 1;
      vx = std::clamp(vx, -options.max_speed, options.max_speed);
      vy = std::clamp(vy, -options.max_speed, options.max_speed);
      const int margin_x = static_cast<int>(tw0 * max_scale) / 2 + 2;
      const int margin_y = static_cast<int>(th0 * max_scale) / 2 + 2;
      if (cx + vx < margin_x || cx + vx > W - margin_x) vx = -vx;
      if (cy + vy < margin_y || cy + vy > H - margin_y) vy = -vy;
      cx += vx;
      cy += vy;
    }
    int tw = tw0, th = th0;
    if (scale) {
      const double s = 1.0 + 0.25 * std::sin(2 * std::numbers::pi * t / 60.0 + scale_phase);
      tw = static_cast<int>(std::lround(tw0 * s));
      th = static_cast<int>(std::lround(th0 * s));
    }
    const int x0 = cx - tw / 2, y0 = cy - th / 2;

    Tensor frame = background;
    paste(frame, scale ? resize(texture, tw, th) : texture, x0, y0);
    const BBox target{x0 + 1.0, y0 + 1.0, static_cast<double>(tw), static_cast<double>(th)};

    std::optional<BBox> occluder;
    if (occlusion && t >= occ_start && t < occ_start + occ_len) {
      const int ow = std::max(4, static_cast<int>(0.7 * tw));
      const int oh = static_cast<int>(1.2 * th);
      const double progress = static_cast<double>(t - occ_start) / (occ_len - 1);
      // Sweeps from fully left of the target to fully right of it.
      const int ox = static_cast<int>(std::lround(x0 - ow + progress * (tw + ow)));
      const int oy = cy - oh / 2;
      paste(frame, resize(occluder_texture, ow, oh), ox, oy);
      occluder = BBox{ox + 1.0, oy + 1.0, static_cast<double>(ow), static_cast<double>(oh)};
    }
    if (blur && t > 0 && (t / 8) % 2 == 1) box_blur(frame, 1 + (t / 16) % 3);
    if (illumination && n_frames > 1) {
      const double gain = 1.0 - 0.55 * std::sin(std::numbers::pi * t / (n_frames - 1));
      for (Scalar& v : frame.values()) v *= gain;
    }
    for (Scalar& v : frame.values()) v = std::round(std::clamp(v, 0.0, 1.0) * 255.0) / 255.0;

    seq.frames.push_back(std::move(frame));
    seq.gt.push_back(target);
    seq.occluders.push_back(occluder);
  }
  return seq;
}

}  // namespace afsl
