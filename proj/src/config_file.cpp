// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>

#include "afsl/harness.hpp"

namespace afsl {

namespace {

struct Field {
  std::string_view key;
  std::function<void(TrackerConfig&, std::string_view)> set;
  std::function<std::string(const TrackerConfig&)> get;
};

template <class T>
T parse_value(std::string_view text) {
  if constexpr (std::is_same_v<T, bool>) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw std::invalid_argument("expected true or false");
  } else {
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw std::invalid_argument("cannot parse '" + std::string(text) + "'");
    }
    return value;
  }
}

template <class T>
std::string print_value(const T& value) {
  if constexpr (std::is_same_v<T, bool>) {
    return value ? "true" : "false";
  } else {
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
  }
}

template <class Access>
Field field(std::string_view key, Access access) {
  using T = std::remove_reference_t<decltype(access(std::declval<TrackerConfig&>()))>;
  return {key,
          [access](TrackerConfig& c, std::string_view v) { access(c) = parse_value<T>(v); },
          [access](const TrackerConfig& c) {
            return print_value(access(const_cast<TrackerConfig&>(c)));
          }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table{
      field("r_c", [](TrackerConfig& c) -> double& { return c.r_c; }),
      field("L", [](TrackerConfig& c) -> int& { return c.L; }),
      field("sbrf1_h", [](TrackerConfig& c) -> int& { return c.sbrf1_h; }),
      field("sbrf1_w", [](TrackerConfig& c) -> int& { return c.sbrf1_w; }),
      field("sbrf2_h", [](TrackerConfig& c) -> int& { return c.sbrf2_h; }),
      field("sbrf2_w", [](TrackerConfig& c) -> int& { return c.sbrf2_w; }),
      field("base_mask_h", [](TrackerConfig& c) -> int& { return c.base_mask_h; }),
      field("base_mask_w", [](TrackerConfig& c) -> int& { return c.base_mask_w; }),
      field("swap_levels", [](TrackerConfig& c) -> bool& { return c.swap_levels; }),
      field("grid_endpoints", [](TrackerConfig& c) -> bool& { return c.grid_endpoints; }),
      field("backbone_width", [](TrackerConfig& c) -> int& { return c.backbone_width; }),
      field("fc1_width", [](TrackerConfig& c) -> int& { return c.fc1_width; }),
      field("fc2_width", [](TrackerConfig& c) -> int& { return c.fc2_width; }),
      field("g_hidden", [](TrackerConfig& c) -> int& { return c.g_hidden; }),
      field("init_iters", [](TrackerConfig& c) -> int& { return c.init_iters; }),
      field("update_period", [](TrackerConfig& c) -> int& { return c.update_period; }),
      field("update_iters", [](TrackerConfig& c) -> int& { return c.update_iters; }),
      field("d_lr", [](TrackerConfig& c) -> double& { return c.d_opt.learning_rate; }),
      field("d_momentum", [](TrackerConfig& c) -> double& { return c.d_opt.momentum; }),
      field("d_weight_decay", [](TrackerConfig& c) -> double& { return c.d_opt.weight_decay; }),
      field("g_lr", [](TrackerConfig& c) -> double& { return c.g_opt.learning_rate; }),
      field("g_momentum", [](TrackerConfig& c) -> double& { return c.g_opt.momentum; }),
      field("g_weight_decay", [](TrackerConfig& c) -> double& { return c.g_opt.weight_decay; }),
      field("batch_pos", [](TrackerConfig& c) -> int& { return c.batch_pos; }),
      field("batch_neg", [](TrackerConfig& c) -> int& { return c.batch_neg; }),
      field("neg_pool", [](TrackerConfig& c) -> int& { return c.neg_pool; }),
      field("lambda", [](TrackerConfig& c) -> double& { return c.lambda; }),
      field("k_drop", [](TrackerConfig& c) -> int& { return c.k_drop; }),
      field("use_generator", [](TrackerConfig& c) -> bool& { return c.use_generator; }),
      field("n_candidates", [](TrackerConfig& c) -> int& { return c.n_candidates; }),
      field("cand_trans_sigma", [](TrackerConfig& c) -> double& { return c.cand_trans_sigma; }),
      field("cand_scale_sigma", [](TrackerConfig& c) -> double& { return c.cand_scale_sigma; }),
      field("top_k", [](TrackerConfig& c) -> int& { return c.top_k; }),
      field("pos_iou", [](TrackerConfig& c) -> double& { return c.pos_iou; }),
      field("neg_iou", [](TrackerConfig& c) -> double& { return c.neg_iou; }),
      field("init_pos", [](TrackerConfig& c) -> int& { return c.init_pos; }),
      field("init_neg", [](TrackerConfig& c) -> int& { return c.init_neg; }),
      field("update_pos", [](TrackerConfig& c) -> int& { return c.update_pos; }),
      field("update_neg", [](TrackerConfig& c) -> int& { return c.update_neg; }),
      field("pos_trans_sigma", [](TrackerConfig& c) -> double& { return c.pos_trans_sigma; }),
      field("pos_scale_sigma", [](TrackerConfig& c) -> double& { return c.pos_scale_sigma; }),
      field("neg_trans_sigma", [](TrackerConfig& c) -> double& { return c.neg_trans_sigma; }),
      field("neg_scale_sigma", [](TrackerConfig& c) -> double& { return c.neg_scale_sigma; }),
      field("reservoir_horizon", [](TrackerConfig& c) -> int& { return c.reservoir_horizon; }),
      field("seed", [](TrackerConfig& c) -> std::uint64_t& { return c.seed; }),
      field("backbone_seed", [](TrackerConfig& c) -> std::uint64_t& { return c.backbone_seed; }),
      field("threads", [](TrackerConfig& c) -> int& { return c.threads; }),
  };
  return table;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

TrackerConfig parse_config(const std::string& text, TrackerConfig base) {
  std::istringstream is(text);
  std::string raw;
  for (int line_no = 1; std::getline(is, raw); ++line_no) {
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected 'key = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto& table = fields();
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Field& f) { return f.key == key; });
    if (it == table.end()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": unknown key '" + std::string(key) + "'");
    }
    try {
      it->set(base, value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ", key '" +
                                  std::string(key) + "': " + e.what());
    }
  }
  base.validate();
  return base;
}

TrackerConfig load_config(const std::filesystem::path& path, TrackerConfig base) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path.string());
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::string format_config(const TrackerConfig& config) {
  std::string out;
  for (const Field& f : fields()) {
    out += std::string(f.key) + " = " + f.get(config) + "\n";
  }
  return out;
}

}  // namespace afsl
