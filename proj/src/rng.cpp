#include "risfdd/rng.hpp"

namespace risfdd {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng make_substream(std::uint64_t master_seed, std::uint64_t stream_id) {
  // Two mixing rounds so that (seed, id) and (seed + 1, id - 1) style
  // collisions cannot alias onto the same engine state.
  return Rng(mix64(mix64(master_seed) ^ (0xd1342543de82ef95ULL * (stream_id + 1))));
}

}  // namespace risfdd
