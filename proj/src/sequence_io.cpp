// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "afsl/harness.hpp"

namespace fs = std::filesystem;

namespace afsl {

namespace {

// Next whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& is) {
  std::string token;
  while (token.empty()) {
    const int c = is.get();
    if (c == EOF) throw std::runtime_error("truncated image header");
    if (c == '#') {
      std::string comment;
      std::getline(is, comment);
    } else if (!std::isspace(c)) {
      token.push_back(static_cast<char>(c));
      while (is.peek() != EOF && !std::isspace(is.peek())) {
        token.push_back(static_cast<char>(is.get()));
      }
    }
  }
  return token;
}

std::string format_number(double v) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

Tensor read_image(const fs::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open image " + path.string());
  const std::string magic = header_token(is);
  if (magic != "P6" && magic != "P5") {
    throw std::runtime_error(path.string() + ": only binary PPM (P6) and PGM (P5) are supported");
  }
  const int w = std::stoi(header_token(is));
  const int h = std::stoi(header_token(is));
  const int maxval = std::stoi(header_token(is));
  if (w < 1 || h < 1 || maxval != 255) {
    throw std::runtime_error(path.string() + ": expected positive size and maxval 255");
  }
  is.get();  // single whitespace before the raster
  const std::size_t channels = magic == "P6" ? 3 : 1;
  const auto W = static_cast<std::size_t>(w), H = static_cast<std::size_t>(h);
  std::vector<unsigned char> raster(W * H * channels);
  if (!is.read(reinterpret_cast<char*>(raster.data()), static_cast<std::streamsize>(raster.size()))) {
    throw std::runtime_error(path.string() + ": truncated raster");
  }
  Tensor image({3, H, W});
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const std::size_t src = channels == 3 ? c : 0;
        image.at(c, y, x) = raster[(y * W + x) * channels + src] / 255.0;
      }
    }
  }
  return image;
}

void write_ppm(const fs::path& path, const Tensor& image) {
  if (image.rank() != 3 || image.dim(0) != 3) {
    throw std::invalid_argument("write_ppm expects (3,H,W), got " + shape_string(image.dims()));
  }
  const std::size_t H = image.dim(1), W = image.dim(2);
  std::vector<unsigned char> raster(W * H * 3);
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      for (std::size_t c = 0; c < 3; ++c) {
        const double v = std::clamp(image.at(c, y, x), 0.0, 1.0);
        raster[(y * W + x) * 3 + c] = static_cast<unsigned char>(std::lround(v * 255.0));
      }
    }
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write image " + path.string());
  os << "P6\n" << W << ' ' << H << "\n255\n";
  os.write(reinterpret_cast<const char*>(raster.data()), static_cast<std::streamsize>(raster.size()));
}

std::vector<BBox> read_groundtruth(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open ground truth " + path.string());
  std::vector<BBox> boxes;
  std::string line;
  for (int line_no = 1; std::getline(is, line); ++line_no) {
    std::replace(line.begin(), line.end(), ',', ' ');
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream fields(line);
    std::array<double, 4> v{};
    std::string extra;
    bool ok = true;
    for (double& x : v) ok = ok && static_cast<bool>(fields >> x);
    if (!ok || (fields >> extra) || !std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); })) {
      throw std::runtime_error(path.filename().string() + " line " + std::to_string(line_no) +
                               ": expected four numbers x,y,w,h");
    }
    boxes.push_back({v[0], v[1], v[2], v[3]});
  }
  return boxes;
}

Sequence load_otb_sequence(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw std::runtime_error(dir.string() + " is not a directory");
  const fs::path image_dir = fs::is_directory(dir / "img") ? dir / "img" : dir;
  std::vector<fs::path> images;
  bool other_images = false;
  for (const fs::directory_entry& e : fs::directory_iterator(image_dir)) {
    if (!e.is_regular_file()) continue;
    const std::string ext = lower(e.path().extension().string());
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") {
      images.push_back(e.path());
    } else if (ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp") {
      other_images = true;
    }
  }
  if (images.empty()) {
    throw std::runtime_error(image_dir.string() +
                             (other_images ? ": only PPM/PGM frames are supported; convert the images first"
                                           : ": no frames found"));
  }
  std::sort(images.begin(), images.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });

  fs::path gt_path = dir / "groundtruth_rect.txt";
  if (!fs::exists(gt_path)) gt_path = dir / "groundtruth.txt";
  if (!fs::exists(gt_path)) throw std::runtime_error(dir.string() + ": no ground-truth file");

  Sequence seq;
  seq.name = dir.filename().string();
  if (seq.name.empty()) seq.name = dir.parent_path().filename().string();
  seq.gt = read_groundtruth(gt_path);
  if (seq.gt.size() != images.size()) {
    throw std::runtime_error(dir.string() + ": " + std::to_string(images.size()) +
                             " frames but " + std::to_string(seq.gt.size()) +
                             " ground-truth lines");
  }
  for (const fs::path& p : images) seq.frames.push_back(read_image(p));
  seq.occluders.assign(seq.frames.size(), std::nullopt);
  std::ifstream attrs(dir / "attributes.txt");
  for (std::string tag; std::getline(attrs, tag);) {
    if (!tag.empty()) seq.attributes.insert(tag);
  }
  return seq;
}

void write_sequence(const Sequence& sequence, const fs::path& dir) {
  if (sequence.frames.size() != sequence.gt.size()) {
    throw std::invalid_argument("write_sequence: frame and box counts differ");
  }
  fs::create_directories(dir / "img");
  for (std::size_t i = 0; i < sequence.frames.size(); ++i) {
    std::string name = std::to_string(i + 1);
    name.insert(0, name.size() < 4 ? 4 - name.size() : 0, '0');
    write_ppm(dir / "img" / (name + ".ppm"), sequence.frames[i]);
  }
  std::ofstream gt(dir / "groundtruth_rect.txt");
  for (const BBox& b : sequence.gt) {
    gt << format_number(b.x) << ',' << format_number(b.y) << ',' << format_number(b.w)
       << ',' << format_number(b.h) << '\n';
  }
  std::ofstream attrs(dir / "attributes.txt");
  for (const std::string& tag : sequence.attributes) attrs << tag << '\n';
  if (!gt || !attrs) throw std::runtime_error("failed writing sequence to " + dir.string());
}

}  // namespace afsl
