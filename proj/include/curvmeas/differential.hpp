#pragma once

#include <vector>

#include "curvmeas/common.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/scene.hpp"

namespace curvmeas {

struct DiffFrame {
  Vec x, a, u;
  double delta = 0;
  double rho = -1;
  Mat Dxi;  // n x n central-difference Jacobian of xi
  Mat Dnu;  // n x n, assembled from Dnu = (T_proj - Dxi)/delta with T = u-perp
  Mat tangent_basis;         // n x (n-1) orthonormal basis of u-perp
  std::vector<double> chi;   // ascending eigenvalues of sym(Dnu | u-perp)
  double sym_residual = 0;       // Frobenius asymmetry of Dnu | u-perp before symmetrizing
  double identity_residual = 0;  // ||Dnu_direct - Dnu||_F
  double step = 0;
};

// Orthonormal basis of the hyperplane perpendicular to unit u. Deterministic.
Mat perp_basis(const Vec& u);

// Central differences of xi at x; Dnu from the projection identity, the
// directly differenced Dnu kept only as identity_residual.
// Throws NotRegular / StencilOutsideDomain.
DiffFrame jacobians(const Scene& scene, const Vec& x, double step_factor,
                    const Tolerances& tols);

// Same, reusing an already-computed regularity result for x.
DiffFrame jacobians(const Scene& scene, const RegularityResult& reg,
                    double step_factor, const Tolerances& tols);

struct DiffDiagnostics {
  double dxi_t_u = 0;   // ||Dxi^T u||
  double dxi_u = 0;     // ||Dxi u||
  double sym_residual = 0;
  double identity_residual = 0;
  double chain_residual = 0;  // ||Dpsi(x) - Dpsi(h_t x) Dh_t(x)||_F
};

// Verifies the projection-differential identities at the frame point.
// t is the dilation factor used for the chain-rule residual (0 < t < rho).
DiffDiagnostics check_differential_identities(const Scene& scene,
                                              const DiffFrame& frame, double t,
                                              const Tolerances& tols);

}  // namespace curvmeas
