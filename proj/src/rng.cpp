#include "curvmeas/rng.hpp"

#include <cmath>

namespace curvmeas {

std::vector<Vec> unit_directions(int dim, int count, std::uint64_t seed) {
  std::vector<Vec> dirs;
  dirs.reserve(count);
  if (dim == 2) {
    double phase = 2 * M_PI * hash_unit(splitmix64(seed));
    for (int k = 0; k < count; ++k) {
      double t = phase + 2 * M_PI * k / count;
      dirs.push_back(make_vec({std::cos(t), std::sin(t)}));
    }
  } else {
    // golden-angle spiral on S^2, phase-shifted by the seed
    const double ga = M_PI * (3.0 - std::sqrt(5.0));
    double phase = 2 * M_PI * hash_unit(splitmix64(seed));
    double zoff = hash_unit(splitmix64(seed + 1)) / count;
    for (int k = 0; k < count; ++k) {
      double z = 1.0 - 2.0 * (k + 0.5) / count + zoff;
      z = std::clamp(z, -1.0, 1.0);
      double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      double t = phase + ga * k;
      dirs.push_back(make_vec({r * std::cos(t), r * std::sin(t), z}));
    }
  }
  return dirs;
}

}  // namespace curvmeas
