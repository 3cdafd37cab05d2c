#include "curvmeas/differential.hpp"

#include <algorithm>
#include <cmath>

namespace curvmeas {

Mat perp_basis(const Vec& u) {
  const int n = static_cast<int>(u.size());
  Mat basis(n, n - 1);
  if (n == 2) {
    basis(0, 0) = -u[1];
    basis(1, 0) = u[0];
  } else {
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::abs(u[i]) < std::abs(u[k])) k = i;
    Vec t = Vec::Zero(3);
    t[k] = 1.0;
    Vec e1 = t - u * u.dot(t);
    e1.normalize();
    Vec e2(3);
    e2 << u[1] * e1[2] - u[2] * e1[1], u[2] * e1[0] - u[0] * e1[2],
        u[0] * e1[1] - u[1] * e1[0];
    basis.col(0) = e1;
    basis.col(1) = e2;
  }
  return basis;
}

DiffFrame jacobians(const Scene& scene, const Vec& x, double step_factor,
                    const Tolerances& tols) {
  return jacobians(scene, is_regular(scene, x, tols), step_factor, tols);
}

DiffFrame jacobians(const Scene& scene, const RegularityResult& reg,
                    double step_factor, const Tolerances& tols) {
  if (!reg.regular) throw NotRegular("jacobians: " + reg.reason);

  const int n = scene.dim();
  const Vec& x = reg.p.x;
  DiffFrame f;
  f.x = x;
  f.a = reg.p.a;
  f.u = reg.p.u;
  f.delta = reg.p.delta;
  f.rho = reg.rho;

  const double room =
      is_infinite(f.rho) ? f.delta : std::min(f.delta, (f.rho - 1.0) * f.delta);
  f.step = std::max(step_factor * room, 1e-12);

  Mat dxi(n, n), dnu_direct(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = f.step;
    std::optional<ProjectedPoint> pp = psi(scene, x + e, tols.proj);
    std::optional<ProjectedPoint> pm = psi(scene, x - e, tols.proj);
    if (!pp || !pm)
      throw StencilOutsideDomain("jacobians: stencil point left U(A)");
    dxi.col(i) = (pp->a - pm->a) / (2 * f.step);
    dnu_direct.col(i) = (pp->u - pm->u) / (2 * f.step);
  }
  f.Dxi = dxi;

  // Dnu from the identity Dnu = delta^{-1} (T_proj - Dxi); the direct
  // difference is kept only as a residual.
  Mat t_proj = Mat::Identity(n, n) - f.u * f.u.transpose();
  f.Dnu = (t_proj - dxi) / f.delta;
  f.identity_residual = (dnu_direct - f.Dnu).norm();

  f.tangent_basis = perp_basis(f.u);
  Mat m = f.tangent_basis.transpose() * f.Dnu * f.tangent_basis;
  f.sym_residual = (m - m.transpose()).norm();
  Mat msym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(msym);
  f.chi.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) f.chi[i] = es.eigenvalues()[i];
  std::sort(f.chi.begin(), f.chi.end());
  return f;
}

DiffDiagnostics check_differential_identities(const Scene& scene,
                                              const DiffFrame& frame, double t,
                                              const Tolerances& tols) {
  DiffDiagnostics d;
  d.dxi_t_u = (frame.Dxi.transpose() * frame.u).norm();
  d.dxi_u = (frame.Dxi * frame.u).norm();
  d.sym_residual = frame.sym_residual;
  d.identity_residual = frame.identity_residual;

  const int n = scene.dim();
  Vec y = frame.a + t * (frame.x - frame.a);
  DiffFrame g = jacobians(scene, y, tols.step_factor, tols);
  Mat dht = frame.Dxi + t * (Mat::Identity(n, n) - frame.Dxi);
  Mat dpsi_x(2 * n, n), dpsi_y(2 * n, n);
  dpsi_x << frame.Dxi, frame.Dnu;
  dpsi_y << g.Dxi, g.Dnu;
  d.chain_residual = (dpsi_x - dpsi_y * dht).norm();
  return d;
}

}  // namespace curvmeas
