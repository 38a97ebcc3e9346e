#pragma once

#include <cstdint>

namespace mpsenc::detail {

// Counter-based generator: every draw is a pure function of (seed, stream, counter),
// so shot i of a run is reproducible regardless of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix3(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ counter);
}

// Uniform in [0, 1).
inline double uniform01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  return (mix3(seed, stream, counter) >> 11) * 0x1.0p-53;
}

}  // namespace mpsenc::detail
