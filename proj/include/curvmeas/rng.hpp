#pragma once

#include <cstdint>
#include <vector>

#include "curvmeas/common.hpp"

namespace curvmeas {

// splitmix64; every randomized choice in the project derives from
// hash chains of a single run seed so results are reproducible.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t seed, std::uint64_t item) {
  return splitmix64(seed ^ (0x9e3779b97f4a7c15ull + item));
}

// uniform in [0,1)
inline double hash_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Quasi-uniform unit directions: equally spaced angles (dim 2) or a
// golden-angle spiral (dim 3), phase-rotated by the seed.
std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed);

}  // namespace curvmeas
