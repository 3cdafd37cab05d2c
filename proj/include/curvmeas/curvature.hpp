#pragma once

#include <memory>
#include <vector>

#include "curvmeas/common.hpp"
#include "curvmeas/differential.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

// kappa = chi / (1 - r chi); kInfinity when |1 - r chi| <= sing_tol
// (directions outside T_A have chi = 1/r exactly).
double kappa_from_chi(double chi, double r, double sing_tol);

struct CurvatureData {
  Vec a, u;
  double r_eval = 0;
  std::vector<double> kappa;  // n-1 entries ascending, kInfinity beyond dim T_A
  Mat T_basis;                // n x m orthonormal basis of T_A(a,u)
  Mat Q;                      // m x m symmetric
  int m = 0;                  // dim T_A(a,u)
  double reach = 0;           // reach function at (a,u)
  double q_presym_residual = 0;
};

// Evaluates jacobians at x = a + r_eval u; T_A from the singular vectors of
// Dxi, Q(tau_i, tau_j) = tau_i . Dnu(v_j) with Dxi(v_j) = tau_j solved by
// least squares on the row space. Throws NotInBundle when the reach at (a,u)
// does not exceed r_eval; propagates NotRegular.
CurvatureData curvature_at(const Scene& scene, const Vec& a, const Vec& u,
                           double r_eval, const Tolerances& tols);

// j-th symmetric function of the principal curvatures, with the limit
// convention kappa -> inf: (1+k^2)^{-1/2} -> 0 and k(1+k^2)^{-1/2} -> 1.
// With c infinite entries this is 0 for j < c and otherwise the sum over
// subsets containing every infinite index. Throws InvalidIndex.
double symmetric_function(const std::vector<double>& kappa, int j);

// Parametric surface with analytic normals and second fundamental form,
// doubling as an exact distance oracle (the manifold as a closed set).
class SmoothSurface {
 public:
  static SmoothSurface circle(const Vec& c, double R);
  static SmoothSurface sphere(const Vec& c, double R);
  static SmoothSurface ellipse(double ax, double by);  // centered, axis-aligned
  static SmoothSurface torus(double R0, double r0);    // z-axis, centered

  const Scene& scene() const { return *scene_; }
  int dim() const;
  int manifold_dim() const;
  double manifold_distance(const Vec& a) const;
  Vec unit_normal(const Vec& a) const;  // outward where that makes sense
  Mat tangent_basis(const Vec& a) const;
  // matrix of b_M(a) . u on tangent_basis(a)
  Mat b_dot_u(const Vec& a, const Vec& u) const;

 private:
  enum class Kind { Circle, Sphere, Ellipse, Torus };
  SmoothSurface(Kind k, Vec c, double p1, double p2);
  Kind kind_;
  Vec c_;
  double p1_ = 0, p2_ = 0;
  std::shared_ptr<Scene> scene_;
};

struct SmoothCompareResult {
  double q_residual = 0;     // ||Q_A(a,u) + b_M(a).u||_F, ambient-form match
  double tangent_angle = 0;  // largest principal angle between T_A and Tan(M,a)
  std::vector<double> kappa;
  CurvatureData data;
};

// Checks Q_A(a,u) = -b_M(a).u against the analytic surface data.
// Throws NotOnManifold when a is off the surface or u is not normal to it.
SmoothCompareResult compare_with_smooth(const SmoothSurface& smooth, const Vec& a,
                                        const Vec& u, double r_eval,
                                        const Tolerances& tols);

}  // namespace curvmeas
