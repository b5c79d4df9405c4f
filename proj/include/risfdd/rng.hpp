#pragma once

#include <cstdint>
#include <random>

namespace risfdd {

using Rng = std::mt19937_64;

// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
std::uint64_t mix64(std::uint64_t x);

// Independent child generator for one (master seed, stream id) pair. Each
// propagation segment and the optimizer start point get their own stream so
// changing how many draws one consumer makes never perturbs the others.
Rng make_substream(std::uint64_t master_seed, std::uint64_t stream_id);

enum StreamId : std::uint64_t {
  kStreamGDl = 0,  // BS-RIS segment, downlink band
  kStreamHDl = 1,  // RIS-UE segment, downlink band
  kStreamGUl = 2,  // BS-RIS segment, uplink band
  kStreamHUl = 3,  // RIS-UE segment, uplink band
  kStreamInit = 4, // optimizer start point (initial reflection phases)
};

}  // namespace risfdd
