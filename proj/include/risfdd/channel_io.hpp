#pragma once

#include <cstdint>
#include <filesystem>

#include "risfdd/channel.hpp"

namespace risfdd {

// Binary channel dump: a fixed header (magic, version, seed, dimensions)
// followed by the four matrices row-major as interleaved re/im doubles in
// the order g_dl, h_dl, g_ul, h_ul. Loaders reject bad magic, version or
// size mismatches with std::runtime_error.
struct ChannelDump {
  ChannelSet channels;
  std::uint64_t seed = 0;
};

void save_channels(const std::filesystem::path& path, const ChannelSet& ch,
                   std::uint64_t seed);
ChannelDump load_channels(const std::filesystem::path& path);

}  // namespace risfdd
