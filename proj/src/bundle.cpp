#include "curvmeas/bundle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "curvmeas/curvature.hpp"
#include "curvmeas/differential.hpp"
#include "curvmeas/mc_tables.hpp"
#include "curvmeas/parallel.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/rng.hpp"

namespace curvmeas {

namespace {

// Root of delta - r along the segment p(in) -> q(out), bisected on the exact
// oracle; the facet vertex error is then pure linearization.
Vec refine_on_edge(const Scene& scene, double r, Vec p, Vec q) {
  for (int it = 0; it < 52; ++it) {
    Vec mid = 0.5 * (p + q);
    if (scene.delta(mid) - r < 0)
      p = mid;
    else
      q = mid;
  }
  return 0.5 * (p + q);
}

std::vector<LevelSample> march_squares(const Scene& scene, double r, int res) {
  Vec lo, hi;
  scene.bbox(lo, hi);
  const double hx = (hi[0] - lo[0]) / res, hy = (hi[1] - lo[1]) / res;
  const int nv = res + 1;

  std::vector<double> phi(static_cast<std::size_t>(nv) * nv);
  parallel_for(nv, [&](std::size_t j) {
    for (int i = 0; i < nv; ++i) {
      Vec p = make_vec({lo[0] + i * hx, lo[1] + j * hy});
      phi[j * nv + i] = scene.delta(p) - r;
    }
  });

  auto vertex = [&](int i, int j) { return make_vec({lo[0] + i * hx, lo[1] + j * hy}); };
  auto inside = [&](int i, int j) { return phi[static_cast<std::size_t>(j) * nv + i] < 0; };

  // cell edges: 0 bottom, 1 right, 2 top, 3 left
  std::vector<LevelSample> out;
  for (int j = 0; j < res; ++j) {
    for (int i = 0; i < res; ++i) {
      bool b0 = inside(i, j), b1 = inside(i + 1, j), b2 = inside(i + 1, j + 1),
           b3 = inside(i, j + 1);
      int code = (b0 ? 1 : 0) | (b1 ? 2 : 0) | (b2 ? 4 : 0) | (b3 ? 8 : 0);
      if (code == 0 || code == 15) continue;

      auto epoint = [&](int e) -> Vec {
        int ai, aj, bi, bj;
        switch (e) {
          case 0: ai = i; aj = j; bi = i + 1; bj = j; break;
          case 1: ai = i + 1; aj = j; bi = i + 1; bj = j + 1; break;
          case 2: ai = i + 1; aj = j + 1; bi = i; bj = j + 1; break;
          default: ai = i; aj = j + 1; bi = i; bj = j; break;
        }
        Vec pa = vertex(ai, aj), pb = vertex(bi, bj);
        bool ain = inside(ai, aj);
        return ain ? refine_on_edge(scene, r, pa, pb)
                   : refine_on_edge(scene, r, pb, pa);
      };

      int segs[2][2] = {{-1, -1}, {-1, -1}};
      int nseg = 0;
      auto add = [&](int e1, int e2) {
        segs[nseg][0] = e1;
        segs[nseg][1] = e2;
        ++nseg;
      };
      switch (code) {
        case 1: add(3, 0); break;
        case 2: add(0, 1); break;
        case 3: add(3, 1); break;
        case 4: add(1, 2); break;
        case 6: add(0, 2); break;
        case 7: add(3, 2); break;
        case 8: add(2, 3); break;
        case 9: add(0, 2); break;
        case 11: add(1, 2); break;
        case 12: add(1, 3); break;
        case 13: add(0, 1); break;
        case 14: add(3, 0); break;
        case 5: {  // corners 0 and 2 inside: the center sample disambiguates
          Vec c = make_vec({lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy});
          if (scene.delta(c) - r < 0) {
            add(0, 1);
            add(2, 3);
          } else {
            add(3, 0);
            add(1, 2);
          }
          break;
        }
        case 10: {
          Vec c = make_vec({lo[0] + (i + 0.5) * hx, lo[1] + (j + 0.5) * hy});
          if (scene.delta(c) - r < 0) {
            add(3, 0);
            add(1, 2);
          } else {
            add(0, 1);
            add(2, 3);
          }
          break;
        }
        default: break;
      }
      for (int s = 0; s < nseg; ++s) {
        Vec p = epoint(segs[s][0]);
        Vec q = epoint(segs[s][1]);
        double len = (q - p).norm();
        if (len < 1e-14) continue;
        LevelSample ls;
        ls.centroid = 0.5 * (p + q);
        ls.patch_area = len;
        ls.cell_id = static_cast<std::uint64_t>(j) * res + i;
        out.push_back(std::move(ls));
      }
    }
  }
  return out;
}

std::vector<LevelSample> march_cubes(const Scene& scene, double r, int res) {
  Vec lo, hi;
  scene.bbox(lo, hi);
  const double hx = (hi[0] - lo[0]) / res, hy = (hi[1] - lo[1]) / res,
               hz = (hi[2] - lo[2]) / res;
  const int nv = res + 1;

  std::vector<double> phi(static_cast<std::size_t>(nv) * nv * nv);
  parallel_for(nv, [&](std::size_t k) {
    for (int j = 0; j < nv; ++j)
      for (int i = 0; i < nv; ++i) {
        Vec p = make_vec({lo[0] + i * hx, lo[1] + j * hy, lo[2] + k * hz});
        phi[(k * static_cast<std::size_t>(nv) + j) * nv + i] = scene.delta(p) - r;
      }
  });
  auto val = [&](int i, int j, int k) {
    return phi[(static_cast<std::size_t>(k) * nv + j) * nv + i];
  };
  auto vertex = [&](int i, int j, int k) {
    return make_vec({lo[0] + i * hx, lo[1] + j * hy, lo[2] + k * hz});
  };

  static const int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                    {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static const int kEdge[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0},
                                   {4, 5}, {5, 6}, {6, 7}, {7, 4},
                                   {0, 4}, {1, 5}, {2, 6}, {3, 7}};

  std::vector<LevelSample> out;
  for (int k = 0; k < res; ++k) {
    for (int j = 0; j < res; ++j) {
      for (int i = 0; i < res; ++i) {
        double v[8];
        Vec pos[8];
        int code = 0;
        for (int c = 0; c < 8; ++c) {
          v[c] = val(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]);
          if (v[c] < 0) code |= 1 << c;
        }
        if (kMcEdgeTable[code] == 0) continue;
        for (int c = 0; c < 8; ++c)
          pos[c] = vertex(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]);
        Vec ept[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kMcEdgeTable[code] & (1 << e))) continue;
          int ca = kEdge[e][0], cb = kEdge[e][1];
          ept[e] = v[ca] < 0 ? refine_on_edge(scene, r, pos[ca], pos[cb])
                             : refine_on_edge(scene, r, pos[cb], pos[ca]);
        }
        const int* tri = kMcTriTable[code];
        for (int t = 0; tri[t] != -1; t += 3) {
          const Vec &p0 = ept[tri[t]], &p1 = ept[tri[t + 1]], &p2 = ept[tri[t + 2]];
          Vec e1 = p1 - p0, e2 = p2 - p0;
          Vec cr(3);
          cr << e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2],
              e1[0] * e2[1] - e1[1] * e2[0];
          double area = 0.5 * cr.norm();
          if (area < 1e-20) continue;
          LevelSample ls;
          ls.centroid = (p0 + p1 + p2) / 3.0;
          ls.patch_area = area;
          ls.cell_id = (static_cast<std::uint64_t>(k) * res + j) * res + i;
          out.push_back(std::move(ls));
        }
      }
    }
  }
  return out;
}

}  // namespace

std::vector<LevelSample> sample_level_set(const Scene& scene, double r,
                                          int grid_res) {
  if (r <= 0) throw Error("sample_level_set: r must be positive");
  if (grid_res < 2) throw Error("sample_level_set: grid_res too small");
  std::vector<LevelSample> out = scene.dim() == 2
                                     ? march_squares(scene, r, grid_res)
                                     : march_cubes(scene, r, grid_res);
  if (out.empty()) throw EmptyLevelSet("sample_level_set: no sign change found");
  return out;
}

std::vector<BundlePoint> lift_to_bundle(const Scene& scene,
                                        const std::vector<LevelSample>& samples,
                                        double r, const Tolerances& tols,
                                        LiftStats* stats) {
  const int n = scene.dim();
  std::vector<BundlePoint> pts(samples.size());
  std::vector<char> ok(samples.size(), 0);

  parallel_for(samples.size(), [&](std::size_t idx) {
    const LevelSample& ls = samples[idx];
    RegularityResult reg = is_regular(scene, ls.centroid, tols);
    if (!reg.regular) return;
    DiffFrame f;
    try {
      f = jacobians(scene, reg, tols.step_factor, tols);
    } catch (const Error&) {
      return;
    }
    double reach = reach_function(scene, f.a, f.u, tols.s_max, tols.ray);
    if (reach <= 0) return;
    BundlePoint bp;
    bp.a = f.a;
    bp.u = f.u;
    bp.reach = reach;
    bp.r_src = r;
    bp.rho = f.rho;
    bp.cell_id = ls.cell_id;
    double jac = 1.0;
    bp.chi = f.chi;
    bp.kappa.resize(n - 1);
    for (int i = 0; i < n - 1; ++i) {
      double c = f.chi[i];
      jac *= std::sqrt((1 - r * c) * (1 - r * c) + c * c);
      bp.kappa[i] = kappa_from_chi(c, r, tols.sing * r);
    }
    std::sort(bp.kappa.begin(), bp.kappa.end(),
              [](double a, double b) { return a < b; });
    bp.weight = ls.patch_area * jac;
    pts[idx] = std::move(bp);
    ok[idx] = 1;
  });

  std::vector<BundlePoint> out;
  out.reserve(samples.size());
  LiftStats st;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    st.total_area += samples[i].patch_area;
    if (ok[i]) {
      out.push_back(std::move(pts[i]));
      ++st.kept;
    } else {
      st.dropped_area += samples[i].patch_area;
      ++st.dropped;
    }
  }
  if (stats) *stats = st;
  return out;
}

MeasureEstimate integrate_bundle(const std::vector<BundlePoint>& points,
                                 const std::function<double(const BundlePoint&)>& f) {
  MeasureEstimate est;
  est.method = "global";
  const std::size_t n = points.size();
  if (n == 0) return est;

  std::vector<double> contrib(n);
  for (std::size_t i = 0; i < n; ++i) contrib[i] = f(points[i]) * points[i].weight;
  est.value = std::accumulate(contrib.begin(), contrib.end(), 0.0);

  // delete-one-block jackknife over spatially contiguous blocks
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (points[a].r_src != points[b].r_src) return points[a].r_src > points[b].r_src;
    return points[a].cell_id < points[b].cell_id;
  });
  const std::size_t nblocks = std::min<std::size_t>(20, n);
  std::vector<double> tb(nblocks, 0.0);
  for (std::size_t p = 0; p < n; ++p)
    tb[p * nblocks / n] += contrib[order[p]];
  double mean = est.value / nblocks;
  double ss = 0;
  for (double t : tb) ss += (t - mean) * (t - mean);
  if (nblocks > 1) est.stderr_ = std::sqrt(ss * nblocks / (nblocks - 1.0));
  return est;
}

std::vector<BundlePoint> sample_bundle(const Scene& scene, const BundleConfig& cfg,
                                       const Tolerances& tols, LiftStats* stats) {
  double r0 = cfg.r * (1.0 + cfg.r_jitter);
  LiftStats total;
  std::vector<BundlePoint> out;
  double upper = kInfinity;
  for (int k = 0; k < std::max(1, cfg.shells); ++k) {
    double rk = r0 * std::pow(0.5, k);
    std::vector<LevelSample> level;
    try {
      level = sample_level_set(scene, rk, cfg.grid_res);
    } catch (const EmptyLevelSet&) {
      break;  // the parallel set collapsed; finer shells only shrink further
    }
    LiftStats st;
    std::vector<BundlePoint> pts = lift_to_bundle(scene, level, rk, tols, &st);
    total.total_area += st.total_area;
    total.dropped_area += st.dropped_area;
    total.dropped += st.dropped;
    for (BundlePoint& p : pts) {
      if (cfg.shells > 1 && !(p.reach > rk && p.reach <= upper)) continue;
      out.push_back(std::move(p));
      ++total.kept;
    }
    upper = rk;
  }
  if (stats) *stats = total;
  return out;
}

}  // namespace curvmeas
