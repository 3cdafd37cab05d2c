#pragma once

#include <optional>
#include <string>

#include "curvmeas/common.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

struct ProjectedPoint {
  Vec x;         // query point
  Vec a;         // nearest point of A
  Vec u;         // unit direction (x - a)/delta
  double delta;  // distance to A
  double rho = -1.0;  // reach ratio; filled on demand, kInfinity allowed
};

// psi_A = (xi_A, nu_A); nullopt when x has no unique nearest point.
std::optional<ProjectedPoint> psi(const Scene& scene, const Vec& x, double tol);

// rho(A,x) = sup{t : delta_A(a + t(x-a)) = t delta_A(x)}, found by bisection
// of the monotone predicate on [1, t_max]; kInfinity if it holds at t_max.
// Throws NotInDomain when x has no unique nearest point.
double rho(const Scene& scene, const Vec& x, double t_max, double tol);

// sup{s : delta_A(a + s u) = s}; 0 means (a,u) is not in the normal bundle.
// Throws NotOnSet when a is not on A.
double reach_function(const Scene& scene, const Vec& a, const Vec& u,
                      double s_max, double tol);

struct DilateResult {
  Vec point;
  bool beyond_rho = false;  // t >= rho(x): the dilation left the safe range
};

// h_t(x) = xi(x) + t (x - xi(x)). Throws NotInDomain.
DilateResult dilate(const Scene& scene, const Vec& x, double t, double tol);

struct RegularityResult {
  bool regular = false;
  ProjectedPoint p;   // valid when the projection succeeded
  double rho = -1.0;  // valid when the projection succeeded
  std::string reason; // why the point was rejected (diagnostic)
};

// Numerical proxy for regular points of xi_A: unique projection, rho > 1,
// finite-difference Jacobian of xi exists with near-symmetric differential,
// and rho at the stencil neighbors does not drop below rho(x) by more than
// the stencil-scale slack.
RegularityResult is_regular(const Scene& scene, const Vec& x, const Tolerances& tols);

}  // namespace curvmeas
