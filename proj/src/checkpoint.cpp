// Copyright 2026 The AFSL Tracker Authors
// SPDX-License-Identifier: Apache-2.0

#include "afsl/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

namespace afsl {

namespace {

constexpr std::array<char, 4> kMagic{'A', 'F', 'S', 'L'};

void put_u32(std::ostream& os, std::uint32_t v) {
  const std::array<unsigned char, 4> bytes{
      static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
      static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(bytes.data()), 4);
}

std::uint32_t get_u32(std::istream& is) {
  std::array<unsigned char, 4> bytes{};
  if (!is.read(reinterpret_cast<char*>(bytes.data()), 4)) {
    throw std::runtime_error("checkpoint truncated");
  }
  return static_cast<std::uint32_t>(bytes[0]) |
         (static_cast<std::uint32_t>(bytes[1]) << 8) |
         (static_cast<std::uint32_t>(bytes[2]) << 16) |
         (static_cast<std::uint32_t>(bytes[3]) << 24);
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path,
                     std::span<const NamedTensor> groups) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write checkpoint " + path.string());
  os.write(kMagic.data(), kMagic.size());
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(groups.size()));
  for (const NamedTensor& g : groups) {
    put_u32(os, static_cast<std::uint32_t>(g.name.size()));
    os.write(g.name.data(), static_cast<std::streamsize>(g.name.size()));
    put_u32(os, static_cast<std::uint32_t>(g.value.rank()));
    for (std::size_t d : g.value.dims()) put_u32(os, static_cast<std::uint32_t>(d));
    for (Scalar v : g.value.values()) {
      put_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
  if (!os) throw std::runtime_error("failed writing checkpoint " + path.string());
}

std::vector<NamedTensor> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint " + path.string());
  std::array<char, 4> magic{};
  if (!is.read(magic.data(), 4) || magic != kMagic) {
    throw std::runtime_error(path.string() + " is not an AFSL checkpoint");
  }
  const std::uint32_t version = get_u32(is);
  if (version != kCheckpointVersion) {
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  }
  const std::uint32_t count = get_u32(is);
  std::vector<NamedTensor> groups;
  for (std::uint32_t i = 0; i < count; ++i) {
    NamedTensor g;
    g.name.resize(get_u32(is));
    if (!is.read(g.name.data(), static_cast<std::streamsize>(g.name.size()))) {
      throw std::runtime_error("checkpoint truncated");
    }
    const std::uint32_t rank = get_u32(is);
    if (rank == 0 || rank > 4) {
      throw std::runtime_error("checkpoint group '" + g.name + "' has rank " +
                               std::to_string(rank));
    }
    Shape dims(rank);
    for (std::size_t& d : dims) d = get_u32(is);
    Tensor value(dims);
    for (Scalar& v : value.values()) v = std::bit_cast<float>(get_u32(is));
    g.value = std::move(value);
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace afsl
