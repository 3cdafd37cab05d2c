#include "curvmeas/curvature.hpp"

#include <algorithm>
#include <cmath>

#include "curvmeas/projection.hpp"

namespace curvmeas {

double kappa_from_chi(double chi, double r, double sing_tol) {
  double denom = 1.0 - r * chi;
  if (std::abs(denom) <= sing_tol) return kInfinity;
  return chi / denom;
}

CurvatureData curvature_at(const Scene& scene, const Vec& a, const Vec& u,
                           double r_eval, const Tolerances& tols) {
  if (r_eval <= 0) throw Error("curvature_at: r_eval must be positive");
  double reach = reach_function(scene, a, u, tols.s_max, tols.ray);
  if (!(reach > r_eval))
    throw NotInBundle("curvature_at: reach does not exceed r_eval");

  const int n = scene.dim();
  Vec x = a + r_eval * u;
  DiffFrame f = jacobians(scene, x, tols.step_factor, tols);

  CurvatureData c;
  c.a = f.a;
  c.u = f.u;
  c.r_eval = r_eval;
  c.reach = reach;

  Eigen::JacobiSVD<Mat> svd(f.Dxi, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vec& sv = svd.singularValues();
  const double cutoff = tols.rank * std::max(sv.size() ? sv[0] : 0.0, 1e-8);
  int m = 0;
  while (m < sv.size() && sv[m] >= cutoff) ++m;
  c.m = m;
  c.T_basis = svd.matrixU().leftCols(m);

  // v_j with Dxi v_j = tau_j, least squares on the row space; with
  // tau_j = U e_j this is the truncated pseudo-inverse column V e_j / s_j.
  Mat vj(n, m);
  for (int j = 0; j < m; ++j) vj.col(j) = svd.matrixV().col(j) / sv[j];
  Mat q = c.T_basis.transpose() * f.Dnu * vj;
  c.q_presym_residual = (q - q.transpose()).norm();
  c.Q = 0.5 * (q + q.transpose());

  c.kappa.assign(n - 1, kInfinity);
  if (m > 0) {
    Eigen::SelfAdjointEigenSolver<Mat> es(c.Q);
    for (int i = 0; i < m; ++i) c.kappa[i] = es.eigenvalues()[i];
    std::sort(c.kappa.begin(), c.kappa.begin() + m);
  }
  return c;
}

double symmetric_function(const std::vector<double>& kappa, int j) {
  const int n1 = static_cast<int>(kappa.size());
  if (j < 0 || j > n1) throw InvalidIndex("symmetric_function: j out of range");
  int n_inf = 0;
  double prefactor = 1.0;
  std::vector<double> finite;
  for (double k : kappa) {
    if (is_infinite(k)) {
      ++n_inf;
    } else {
      finite.push_back(k);
      prefactor /= std::sqrt(1.0 + k * k);
    }
  }
  if (j < n_inf) return 0.0;
  const int want = j - n_inf;  // elementary symmetric degree over finite entries
  std::vector<double> e(want + 1, 0.0);
  e[0] = 1.0;
  for (double k : finite)
    for (int t = want; t >= 1; --t) e[t] += k * e[t - 1];
  return prefactor * e[want];
}

}  // namespace curvmeas
