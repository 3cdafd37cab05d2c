#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "curvmeas/common.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct ChecksConfig {
  int grid_res = 256;
  double r = 0.5;
  std::uint64_t seed = 1;
  Tolerances tols;
  int sample_points = 200;  // regular points per derivative check
};

// Full invariant suite over one scene; each entry is one named pass/fail.
std::vector<CheckResult> run_checks(const Scene& scene, const ChecksConfig& cfg);

// Plain-text report, one line per check (stable bytes for a fixed config).
std::string format_checks(const std::vector<CheckResult>& results);

}  // namespace curvmeas
