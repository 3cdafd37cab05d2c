#include "curvmeas/projection.hpp"

#include <cmath>

namespace curvmeas {

namespace {

constexpr int kBisectIters = 60;

// Scale-aware slack for the ray predicates: the distance oracle is exact,
// but at s ~ 1e6 plain doubles round at ~1e-10.
inline double ray_slack(double tol, double s) { return tol * std::max(1.0, s); }

}  // namespace

std::optional<ProjectedPoint> psi(const Scene& scene, const Vec& x, double tol) {
  std::optional<Vec> a = scene.xi(x, tol);
  if (!a) return std::nullopt;
  ProjectedPoint p;
  p.x = x;
  p.a = *a;
  p.delta = (x - *a).norm();
  if (p.delta <= tol) return std::nullopt;  // x effectively on A
  p.u = (x - *a) / p.delta;
  return p;
}

double rho(const Scene& scene, const Vec& x, double t_max, double tol) {
  std::optional<ProjectedPoint> p = psi(scene, x, tol);
  if (!p) throw NotInDomain("rho: no unique nearest point");
  const Vec& a = p->a;
  const Vec dirv = x - a;  // length delta
  const double d = p->delta;
  auto pred = [&](double t) {
    return scene.delta(a + t * dirv) >= t * d - ray_slack(tol, t * d);
  };
  if (pred(t_max)) return kInfinity;
  double lo = 1.0, hi = t_max;
  for (int i = 0; i < kBisectIters && (hi - lo) * d > tol * d; ++i) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  return lo;
}

double reach_function(const Scene& scene, const Vec& a, const Vec& u,
                      double s_max, double tol) {
  if (scene.delta(a) > tol) throw NotOnSet("reach_function: base point not on A");
  auto pred = [&](double s) {
    return scene.delta(a + s * u) >= s - ray_slack(tol, s);
  };
  if (pred(s_max)) return kInfinity;
  double lo = 0.0, hi = s_max;
  for (int i = 0; i < kBisectIters && hi - lo > tol; ++i) {
    double mid = 0.5 * (lo + hi);
    (pred(mid) ? lo : hi) = mid;
  }
  // below the bisection floor the direction is not in the bundle
  if (lo <= 10 * tol) return 0.0;
  return lo;
}

DilateResult dilate(const Scene& scene, const Vec& x, double t, double tol) {
  if (t <= 0) throw Error("dilate: t must be positive");
  std::optional<ProjectedPoint> p = psi(scene, x, tol);
  if (!p) throw NotInDomain("dilate: no unique nearest point");
  DilateResult r;
  r.point = p->a + t * (x - p->a);
  if (t >= 1.0) {
    Tolerances tt;
    double rx = rho(scene, x, tt.t_max, tol);
    r.beyond_rho = !is_infinite(rx) && t >= rx;
  }
  return r;
}

RegularityResult is_regular(const Scene& scene, const Vec& x, const Tolerances& tols) {
  RegularityResult res;
  std::optional<ProjectedPoint> p = psi(scene, x, tols.proj);
  if (!p) {
    res.reason = "no unique nearest point";
    return res;
  }
  res.p = *p;
  double rx = rho(scene, x, tols.t_max, tols.ray);
  res.rho = rx;
  res.p.rho = rx;
  if (!(is_infinite(rx) || rx > 1.0 + tols.diff)) {
    res.reason = "rho(x) not above 1";
    return res;
  }

  const int n = scene.dim();
  const double d = p->delta;
  const double room = is_infinite(rx) ? d : std::min(d, (rx - 1.0) * d);
  const double h = std::max(tols.step_factor * room, 1e-12);

  // rho may vary at rate ~rho/delta along the ray, so the stencil test gets
  // slack proportional to the step; a hard discontinuity still trips it.
  const double rel_slack = std::max(tols.diff, 10.0 * h / d);

  Mat dxi(n, n);
  for (int i = 0; i < n; ++i) {
    Vec e = Vec::Zero(n);
    e[i] = h;
    std::optional<Vec> fp = scene.xi(x + e, tols.proj);
    std::optional<Vec> fm = scene.xi(x - e, tols.proj);
    if (!fp || !fm) {
      res.reason = "stencil point left U(A)";
      return res;
    }
    dxi.col(i) = (*fp - *fm) / (2 * h);
    double rp = rho(scene, x + e, tols.t_max, tols.ray);
    double rm = rho(scene, x - e, tols.t_max, tols.ray);
    // When rho(x) is finite, neighbors must stay within stencil-scale slack;
    // when it is infinite, neighbors may be finite (tilted rays eventually
    // cross a far medial shadow) but must not collapse to order one.
    double floor_rho =
        is_infinite(rx) ? 10.0 : rx * (1.0 - rel_slack);
    if ((!is_infinite(rp) && rp < floor_rho) ||
        (!is_infinite(rm) && rm < floor_rho)) {
      res.reason = "rho drops at stencil neighbor";
      return res;
    }
  }
  double sym = (dxi - dxi.transpose()).norm();
  if (sym > tols.diff * (1.0 + dxi.norm())) {
    res.reason = "asymmetric differential";
    return res;
  }
  res.regular = true;
  return res;
}

}  // namespace curvmeas
