#pragma once

#include <string>

#include "curvmeas/common.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

// Grid volume of {delta_A <= r} with one level of boundary-cell subdivision.
// Deliberately shares nothing with the level-set/bundle code paths beyond
// the distance oracle itself.
double parallel_volume(const Scene& scene, double r, int grid_res);

struct ReferenceValue {
  std::string name;
  double value = 0;
  std::string source;  // closed_form | grid_bruteforce | dense_scan
  int grid_res = 0;
};

// Closed-form reference values for the test scenes. Supported shape kinds:
// disc, square, segment2, point, ball3, box3, sphere3, torus_outer.
// Quantities: perimeter, area, bundle_length, principal_curvature_1/2, mu_0/1/2.
// Throws Unsupported.
ReferenceValue analytic_reference(const std::string& shape_kind,
                                  const std::string& quantity);

// Linear scan of delta(a + s u) - s with bisection refinement of the first
// violation bracket; independent check for reach_function.
double dense_scan_reach(const Scene& scene, const Vec& a, const Vec& u,
                        double s_max, int steps);

}  // namespace curvmeas
