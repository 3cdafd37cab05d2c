#include "curvmeas/oracle.hpp"

#include <cmath>
#include <map>

#include "curvmeas/parallel.hpp"

namespace curvmeas {

double parallel_volume(const Scene& scene, double r, int grid_res) {
  if (r < 0) throw Error("parallel_volume: r must be nonnegative");
  if (r >= scene.bbox_margin())
    throw Error("parallel_volume: r reaches past the bbox margin");
  Vec lo, hi;
  scene.bbox(lo, hi);
  const int n = scene.dim();

  if (n == 2) {
    const double hx = (hi[0] - lo[0]) / grid_res, hy = (hi[1] - lo[1]) / grid_res;
    const double cellvol = hx * hy;
    const double halfdiag = 0.5 * std::hypot(hx, hy);
    std::vector<double> rowsum(grid_res, 0.0);
    parallel_for(grid_res, [&](std::size_t j) {
      double acc = 0;
      for (int i = 0; i < grid_res; ++i) {
        Vec c = make_vec({lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy});
        double d = scene.delta(c);
        if (std::abs(d - r) <= halfdiag) {
          int cnt = 0;
          for (int si = 0; si < 2; ++si)
            for (int sj = 0; sj < 2; ++sj) {
              Vec sc = make_vec({lo[0] + (i + 0.25 + 0.5 * si) * hx,
                                 lo[1] + (j + 0.25 + 0.5 * sj) * hy});
              if (scene.delta(sc) <= r) ++cnt;
            }
          acc += cellvol * cnt / 4.0;
        } else if (d <= r) {
          acc += cellvol;
        }
      }
      rowsum[j] = acc;
    });
    double total = 0;
    for (double v : rowsum) total += v;
    return total;
  }

  const double hx = (hi[0] - lo[0]) / grid_res, hy = (hi[1] - lo[1]) / grid_res,
               hz = (hi[2] - lo[2]) / grid_res;
  const double cellvol = hx * hy * hz;
  const double halfdiag = 0.5 * std::sqrt(hx * hx + hy * hy + hz * hz);
  std::vector<double> slabsum(grid_res, 0.0);
  parallel_for(grid_res, [&](std::size_t k) {
    double acc = 0;
    for (int j = 0; j < grid_res; ++j)
      for (int i = 0; i < grid_res; ++i) {
        Vec c = make_vec({lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy,
                          lo[2] + (k + 0.5) * hz});
        double d = scene.delta(c);
        if (std::abs(d - r) <= halfdiag) {
          int cnt = 0;
          for (int si = 0; si < 2; ++si)
            for (int sj = 0; sj < 2; ++sj)
              for (int sk = 0; sk < 2; ++sk) {
                Vec sc = make_vec({lo[0] + (i + 0.25 + 0.5 * si) * hx,
                                   lo[1] + (j + 0.25 + 0.5 * sj) * hy,
                                   lo[2] + (k + 0.25 + 0.5 * sk) * hz});
                if (scene.delta(sc) <= r) ++cnt;
              }
          acc += cellvol * cnt / 8.0;
        } else if (d <= r) {
          acc += cellvol;
        }
      }
    slabsum[k] = acc;
  });
  double total = 0;
  for (double v : slabsum) total += v;
  return total;
}

ReferenceValue analytic_reference(const std::string& shape_kind,
                                  const std::string& quantity) {
  static const std::map<std::pair<std::string, std::string>, double> table = {
      // unit disc
      {{"disc", "perimeter"}, 2 * M_PI},
      {{"disc", "area"}, M_PI},
      {{"disc", "bundle_length"}, 2 * M_PI * std::sqrt(2.0)},
      {{"disc", "principal_curvature_1"}, 1.0},
      {{"disc", "mu_0"}, 1.0},
      {{"disc", "mu_1"}, M_PI},
      // unit square
      {{"square", "perimeter"}, 4.0},
      {{"square", "area"}, 1.0},
      {{"square", "bundle_length"}, 4.0 + 2 * M_PI},
      {{"square", "mu_0"}, 1.0},
      {{"square", "mu_1"}, 2.0},
      // segment of length 2 in the plane
      {{"segment2", "area"}, 0.0},
      {{"segment2", "bundle_length"}, 4.0 + 2 * M_PI},
      {{"segment2", "mu_0"}, 1.0},
      {{"segment2", "mu_1"}, 2.0},
      // single point in the plane
      {{"point", "area"}, 0.0},
      {{"point", "bundle_length"}, 2 * M_PI},
      {{"point", "mu_0"}, 1.0},
      // unit ball in R^3
      {{"ball3", "area"}, 4 * M_PI / 3},
      {{"ball3", "perimeter"}, 4 * M_PI},
      {{"ball3", "bundle_length"}, 8 * M_PI},
      {{"ball3", "mu_0"}, 1.0},
      {{"ball3", "mu_1"}, 4.0},
      {{"ball3", "mu_2"}, 2 * M_PI},
      // unit cube
      {{"box3", "area"}, 1.0},
      {{"box3", "mu_0"}, 1.0},
      {{"box3", "mu_1"}, 3.0},
      {{"box3", "mu_2"}, 3.0},
      // sphere shell of radius 2
      {{"sphere3", "principal_curvature_1"}, 0.5},
      {{"sphere3", "principal_curvature_2"}, 0.5},
      // torus (R0=2, r0=0.5), outer equator
      {{"torus_outer", "principal_curvature_1"}, 0.4},
      {{"torus_outer", "principal_curvature_2"}, 2.0},
  };
  auto it = table.find({shape_kind, quantity});
  if (it == table.end())
    throw Unsupported("analytic_reference: " + shape_kind + "/" + quantity);
  ReferenceValue v;
  v.name = shape_kind + "." + quantity;
  v.value = it->second;
  v.source = "closed_form";
  return v;
}

double dense_scan_reach(const Scene& scene, const Vec& a, const Vec& u,
                        double s_max, int steps) {
  if (steps < 10000) throw Error("dense_scan_reach: needs >= 1e4 steps");
  auto holds = [&](double s) {
    return scene.delta(a + s * u) >= s - 1e-9 * std::max(1.0, s);
  };
  double prev = 0;
  for (int k = 1; k <= steps; ++k) {
    double s = s_max * k / steps;
    if (!holds(s)) {
      double lo = prev, hi = s;
      for (int it = 0; it < 60; ++it) {
        double mid = 0.5 * (lo + hi);
        (holds(mid) ? lo : hi) = mid;
      }
      return lo;
    }
    prev = s;
  }
  return kInfinity;
}

}  // namespace curvmeas
