#pragma once

#include <functional>
#include <vector>

#include "curvmeas/bundle.hpp"
#include "curvmeas/common.hpp"
#include "curvmeas/estimate.hpp"
#include "curvmeas/scene.hpp"
#include "curvmeas/strata.hpp"

namespace curvmeas {

// Volume of the unit k-ball, closed form (exact for k <= 3).
double alpha_volume(int k);

using Selector = std::function<bool(const Vec& a, const Vec& u)>;

inline bool select_all(const Vec&, const Vec&) { return true; }

// Samples the bundle and labels strata in one pass; cell is the grid spacing
// used for the corner-exclusion rule.
std::vector<BundlePoint> bundle_with_strata(const Scene& scene,
                                            const BundleConfig& bundle_cfg,
                                            const StrataConfig& strata_cfg,
                                            const Tolerances& tols,
                                            LiftStats* stats = nullptr);

// mu_m(T) = ((n-m) alpha(n-m))^{-1} int_T H_{n-m-1} dH^{n-1} over the
// sampled bundle.
MeasureEstimate mu_global(const Scene& scene, int m, const Selector& T,
                          const BundleConfig& cfg, const Tolerances& tols);

// Same estimator on an existing bundle sample.
MeasureEstimate mu_global_on(const std::vector<BundlePoint>& points, int m,
                             const Selector& T, int dim,
                             double uncaptured = 0);

struct StratifiedConfig {
  int density = 512;        // base nodes per stratum extent
  int fiber_density = 64;   // fiber nodes per fan
  double r_fiber = 0.25;    // curvature radius for cross-stratum terms,
                            // capped at 0.45 * reach
  StrataConfig strata;
};

// Fiber representation over the strata: for each stratum j >= m the fiber
// integrand is the elementary symmetric polynomial e_{j-m} of the finite
// principal curvatures (1 when j = m, matching the H^m representation
// theorem; higher strata carry the curvature excess).
MeasureEstimate mu_stratified(const Scene& scene, int m, const Selector& T,
                              const StratifiedConfig& cfg, const Tolerances& tols);

// Fits Leb({delta <= r}) - Leb(A) = sum_m r^{n-m} alpha(n-m) mu_m on
// grid-measured parallel volumes; the constant term is anchored, not fitted.
// Throws ReachTooSmall when a radius reaches past the bundle's minimum reach.
std::vector<MeasureEstimate> steiner_fit(const Scene& scene,
                                         const std::vector<double>& radii,
                                         int grid_res);

struct CoareaResult {
  double lhs = 0;  // bundle integral of f * prod (1+kappa_i^2)^{-1/2}, i <= m
  double rhs = 0;  // stratum integral of the fiber sums of f
  double rel_gap = 0;
};

using BundleFunction = std::function<double(const Vec& a, const Vec& u)>;

CoareaResult coarea_check(const Scene& scene, int m, const BundleFunction& f,
                          const BundleConfig& bundle_cfg,
                          const StratifiedConfig& strat_cfg,
                          const Tolerances& tols);

// Fraction of bundle weight over {S and stratum j} where kappa_m is flagged
// infinite; 1 is expected when j < m under the representation theorem.
double infinite_curvature_census(const std::vector<BundlePoint>& labeled,
                                 const Selector& S, int j, int m);

}  // namespace curvmeas
