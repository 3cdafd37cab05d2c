#pragma once

#include <cstdint>
#include <vector>

#include "curvmeas/bundle.hpp"
#include "curvmeas/common.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

struct StratumLabel {
  Vec a;
  int m = 0;        // stratum index, dim of the stratum piece
  int dis_dim = 0;  // n - m, dimension of the normal fan Dis(A,a)
  double confidence = 1.0;
};

struct StrataConfig {
  double s_probe = -1;    // <0: auto, 1e-3 * scene diameter
  int n_dirs = -1;        // <0: auto, 256 (dim 2) / 2048 (dim 3)
  double tol = 1e-9;      // on-set tolerance
  double rank_rel = 0.1;  // relative singular-value cutoff for the fan dimension
  std::uint64_t seed = 0;
};

// Probes quasi-uniform directions u and collects those with
// delta(a + s u) = s up to the direction-grid capture window; the fan
// dimension is the rank of the collected direction matrix.
// Throws NotOnSet when a is off A.
StratumLabel classify_stratum(const Scene& scene, const Vec& a,
                              const StrataConfig& cfg);

// Classifies the base point of every bundle sample, writing the stratum
// field. Bases within 2 grid cells of a lower-dimensional feature resolve
// to the lower stratum. cell = grid spacing of the sampling run.
void label_strata(const Scene& scene, std::vector<BundlePoint>& points,
                  const StrataConfig& cfg, double cell);

// Points whose base classifies into stratum m (labels them first if unset).
std::vector<BundlePoint> restrict_bundle(const std::vector<BundlePoint>& points,
                                         int m, const Scene& scene,
                                         const StrataConfig& cfg, double cell);

}  // namespace curvmeas
