#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "curvmeas/common.hpp"
#include "curvmeas/estimate.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

struct LevelSample {
  Vec centroid;
  double patch_area = 0;  // facet length (dim 2) or area (dim 3)
  std::uint64_t cell_id = 0;
};

// Extracts S(A,r) by marching squares/cubes on the exact delta grid; every
// facet vertex is root-refined along its grid edge, so patch positions are
// exact and only the polygonal linearization remains. Throws EmptyLevelSet.
std::vector<LevelSample> sample_level_set(const Scene& scene, double r,
                                          int grid_res);

struct BundlePoint {
  Vec a, u;
  double reach = 0;   // reach function at (a,u)
  double r_src = 0;   // level the point was lifted from
  double weight = 0;  // H^{n-1} quadrature weight on N(A)
  std::vector<double> chi;    // ascending
  std::vector<double> kappa;  // ascending, kInfinity allowed
  int stratum = -1;           // unset until classified
  bool stratum_forced = false;  // resolved downward by the corner-exclusion rule
  std::uint64_t cell_id = 0;
  double rho = 0;
};

struct LiftStats {
  double total_area = 0;    // level-set measure seen
  double dropped_area = 0;  // patches dropped at non-regular points
  std::size_t kept = 0;
  std::size_t dropped = 0;
};

// psi-lift of level samples with the area-formula Jacobian
//   J_psi = prod_i sqrt((1 - r chi_i)^2 + chi_i^2);
// non-regular points are dropped and accounted in stats.
std::vector<BundlePoint> lift_to_bundle(const Scene& scene,
                                        const std::vector<LevelSample>& samples,
                                        double r, const Tolerances& tols,
                                        LiftStats* stats = nullptr);

// Weighted sum of f over the bundle with a delete-one-block jackknife
// standard error over spatial blocks.
MeasureEstimate integrate_bundle(const std::vector<BundlePoint>& points,
                                 const std::function<double(const BundlePoint&)>& f);

struct BundleConfig {
  double r = 0.5;
  int grid_res = 512;
  int shells = 1;       // >1: dyadic levels r, r/2, ... with reach-shell selection
  double r_jitter = 0;  // relative jitter applied to r (seeded by the caller)
  std::uint64_t seed = 0;
};

// Single-level sampling, or a dyadic shell decomposition where level r_k only
// keeps points whose reach lies in (r_k, r_{k-1}]; shells avoid double
// counting because coarser levels already carried the longer-reach points.
std::vector<BundlePoint> sample_bundle(const Scene& scene, const BundleConfig& cfg,
                                       const Tolerances& tols,
                                       LiftStats* stats = nullptr);

}  // namespace curvmeas
