// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#ifndef AFSL_CHECKPOINT_HPP_
#define AFSL_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "afsl/networks.hpp"

namespace afsl {

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Writes parameter groups in the little-endian layout described in
/// docs/checkpoint_format.md. Values are stored as 32-bit floats.
void save_checkpoint(const std::filesystem::path& path,
                     std::span<const NamedTensor> groups);

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path);

}  // namespace afsl

#endif  // AFSL_CHECKPOINT_HPP_
