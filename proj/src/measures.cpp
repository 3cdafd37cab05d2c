#include "curvmeas/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "curvmeas/curvature.hpp"
#include "curvmeas/oracle.hpp"
#include "curvmeas/parallel.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/rng.hpp"

namespace curvmeas {

double alpha_volume(int k) {
  switch (k) {
    case 0: return 1.0;
    case 1: return 2.0;
    case 2: return M_PI;
    case 3: return 4.0 * M_PI / 3.0;
    default:
      return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0);
  }
}

std::vector<BundlePoint> bundle_with_strata(const Scene& scene,
                                            const BundleConfig& bundle_cfg,
                                            const StrataConfig& strata_cfg,
                                            const Tolerances& tols,
                                            LiftStats* stats) {
  std::vector<BundlePoint> pts = sample_bundle(scene, bundle_cfg, tols, stats);
  Vec lo, hi;
  scene.bbox(lo, hi);
  double cell = (hi - lo).maxCoeff() / bundle_cfg.grid_res;
  label_strata(scene, pts, strata_cfg, cell);
  return pts;
}

MeasureEstimate mu_global_on(const std::vector<BundlePoint>& points, int m,
                             const Selector& T, int dim, double uncaptured) {
  if (m < 0 || m > dim - 1) throw InvalidIndex("mu_global: m out of range");
  const int j = dim - m - 1;
  MeasureEstimate est = integrate_bundle(points, [&](const BundlePoint& p) {
    if (!T(p.a, p.u)) return 0.0;
    return symmetric_function(p.kappa, j);
  });
  const double scale = 1.0 / ((dim - m) * alpha_volume(dim - m));
  est.m = m;
  est.value *= scale;
  est.stderr_ *= scale;
  est.method = "global";
  est.uncaptured = uncaptured;
  return est;
}

MeasureEstimate mu_global(const Scene& scene, int m, const Selector& T,
                          const BundleConfig& cfg, const Tolerances& tols) {
  LiftStats stats;
  std::vector<BundlePoint> pts = sample_bundle(scene, cfg, tols, &stats);
  return mu_global_on(pts, m, T, scene.dim(), stats.dropped_area);
}

namespace {

// Validated stratum samples: bases must classify into their stratum and, on
// union scenes, fiber directions must survive the blocking probe.
std::vector<StratumSample> validated_samples(const Scene& scene, int j,
                                             const StratifiedConfig& cfg) {
  std::vector<StratumSample> cand = scene.stratum_samples(j, cfg.density);
  if (scene.shapes().size() <= 1) return cand;

  const double s_probe =
      cfg.strata.s_probe > 0 ? cfg.strata.s_probe : 1e-3 * scene.diameter();
  std::vector<char> keep(cand.size(), 0);
  parallel_for(cand.size(), [&](std::size_t i) {
    StrataConfig sc = cfg.strata;
    sc.seed = hash_combine(cfg.strata.seed, i);
    StratumLabel lab;
    try {
      lab = classify_stratum(scene, cand[i].z, sc);
    } catch (const NotOnSet&) {
      return;
    }
    if (lab.m != j) return;
    // drop fiber directions blocked by other shapes (exact dirs, tiny slack)
    std::vector<Vec> dirs;
    std::vector<double> w;
    for (std::size_t k = 0; k < cand[i].fiber_dirs.size(); ++k) {
      const Vec& v = cand[i].fiber_dirs[k];
      if (scene.delta(cand[i].z + s_probe * v) >= s_probe * (1 - 1e-9)) {
        dirs.push_back(v);
        w.push_back(cand[i].fiber_w[k]);
      }
    }
    cand[i].fiber_dirs = std::move(dirs);
    cand[i].fiber_w = std::move(w);
    keep[i] = 1;
  });
  std::vector<StratumSample> out;
  for (std::size_t i = 0; i < cand.size(); ++i)
    if (keep[i]) out.push_back(std::move(cand[i]));
  return out;
}

// Elementary symmetric polynomial of the finite kappa entries.
double elem_sym_finite(const std::vector<double>& kappa, int deg) {
  std::vector<double> e(deg + 1, 0.0);
  e[0] = 1.0;
  for (double k : kappa) {
    if (is_infinite(k)) continue;
    for (int t = deg; t >= 1; --t) e[t] += k * e[t - 1];
  }
  return e[deg];
}

struct FiberTermResult {
  double value = 0;
  double skipped_weight = 0;
  std::vector<double> node_contrib;  // per base node, for the jackknife
};

// int_{A^(j)} int_{N(A,z)} g(z,v) dH^{n-1-j} dH^j with
// g = e_{j-m}(finite kappa) * 1_T. Curvature is evaluated only when j > m.
FiberTermResult stratum_fiber_integral(const Scene& scene, int j, int m,
                                       const Selector& T,
                                       const StratifiedConfig& cfg,
                                       const Tolerances& tols) {
  FiberTermResult res;
  std::vector<StratumSample> samples = validated_samples(scene, j, cfg);
  if (samples.empty()) return res;

  std::vector<double> contrib(samples.size(), 0.0);
  std::vector<double> skipped(samples.size(), 0.0);
  parallel_for(samples.size(), [&](std::size_t i) {
    const StratumSample& s = samples[i];
    double acc = 0;
    for (std::size_t k = 0; k < s.fiber_dirs.size(); ++k) {
      const Vec& v = s.fiber_dirs[k];
      if (!T(s.z, v)) continue;
      double g = 1.0;
      if (j > m) {
        double reach = reach_function(scene, s.z, v, tols.s_max, tols.ray);
        if (reach <= 0) continue;
        double r_eval = std::min(cfg.r_fiber, 0.45 * reach);
        try {
          CurvatureData c = curvature_at(scene, s.z, v, r_eval, tols);
          g = elem_sym_finite(c.kappa, j - m);
        } catch (const Error&) {
          skipped[i] += s.w_base * s.fiber_w[k];
          continue;
        }
      }
      acc += g * s.fiber_w[k];
    }
    contrib[i] = acc * s.w_base;
  });
  res.node_contrib = contrib;
  res.value = std::accumulate(contrib.begin(), contrib.end(), 0.0);
  res.skipped_weight = std::accumulate(skipped.begin(), skipped.end(), 0.0);
  return res;
}

double blocked_stderr(const std::vector<double>& contrib) {
  const std::size_t n = contrib.size();
  if (n < 2) return 0.0;
  const std::size_t nb = std::min<std::size_t>(20, n);
  std::vector<double> tb(nb, 0.0);
  for (std::size_t i = 0; i < n; ++i) tb[i * nb / n] += contrib[i];
  double total = std::accumulate(tb.begin(), tb.end(), 0.0);
  double mean = total / nb;
  double ss = 0;
  for (double t : tb) ss += (t - mean) * (t - mean);
  return std::sqrt(ss * nb / (nb - 1.0));
}

}  // namespace

MeasureEstimate mu_stratified(const Scene& scene, int m, const Selector& T,
                              const StratifiedConfig& cfg, const Tolerances& tols) {
  const int n = scene.dim();
  if (m < 0 || m > n - 1) throw InvalidIndex("mu_stratified: m out of range");

  MeasureEstimate est;
  est.m = m;
  est.method = "stratified";
  double var = 0;
  bool any = false;
  for (int j = m; j <= n - 1; ++j) {
    FiberTermResult term = stratum_fiber_integral(scene, j, m, T, cfg, tols);
    if (!term.node_contrib.empty()) any = true;
    est.value += term.value;
    est.uncaptured += term.skipped_weight;
    double se = blocked_stderr(term.node_contrib);
    var += se * se;
  }
  const double scale = 1.0 / ((n - m) * alpha_volume(n - m));
  est.value *= scale;
  est.stderr_ = std::sqrt(var) * scale;
  est.uncaptured *= scale;
  if (!any) est.method = "stratified(empty)";
  return est;
}

std::vector<MeasureEstimate> steiner_fit(const Scene& scene,
                                         const std::vector<double>& radii,
                                         int grid_res) {
  const int n = scene.dim();
  if (static_cast<int>(radii.size()) < n + 1)
    throw Error("steiner_fit: need at least dim+1 radii");
  double rmax = *std::max_element(radii.begin(), radii.end());

  // pilot reach check at a coarse grid
  {
    Tolerances tols;
    BundleConfig pilot;
    pilot.r = 0.5 * *std::min_element(radii.begin(), radii.end());
    pilot.grid_res = std::min(grid_res, n == 2 ? 128 : 48);
    std::vector<BundlePoint> pts = sample_bundle(scene, pilot, tols, nullptr);
    double min_reach = kInfinity;
    for (const BundlePoint& p : pts) min_reach = std::min(min_reach, p.reach);
    if (rmax >= min_reach)
      throw ReachTooSmall("steiner_fit: a radius reaches past the minimum reach");
  }

  const double v0 = parallel_volume(scene, 0.0, grid_res);
  std::vector<double> y(radii.size()), sigma(radii.size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double v = parallel_volume(scene, radii[i], grid_res);
    double v_coarse = parallel_volume(scene, radii[i], grid_res / 2);
    double v0_coarse = parallel_volume(scene, 0.0, grid_res / 2);
    y[i] = v - v0;
    // grid-resolution error estimate, floored to keep weights finite
    sigma[i] = std::max(std::abs((v - v0) - (v_coarse - v0_coarse)), 1e-8 * std::abs(y[i]) + 1e-12);
  }

  // weighted LSQ for y = sum_{k=1..n} c_k r^k
  Mat xtx = Mat::Zero(n, n);
  Vec xty = Vec::Zero(n);
  for (std::size_t i = 0; i < radii.size(); ++i) {
    Vec row(n);
    for (int k = 1; k <= n; ++k) row[k - 1] = std::pow(radii[i], k);
    double w = 1.0 / (sigma[i] * sigma[i]);
    xtx += w * row * row.transpose();
    xty += w * row * y[i];
  }
  Vec c = xtx.ldlt().solve(xty);
  Mat cov = xtx.inverse();
  double chi2 = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    double fit = 0;
    for (int k = 1; k <= n; ++k) fit += c[k - 1] * std::pow(radii[i], k);
    chi2 += (y[i] - fit) * (y[i] - fit) / (sigma[i] * sigma[i]);
  }
  int dof = static_cast<int>(radii.size()) - n;
  double scale2 = dof > 0 ? std::max(1.0, chi2 / dof) : 1.0;

  std::vector<MeasureEstimate> out;
  for (int m = n - 1; m >= 0; --m) {
    int k = n - m;  // power of r carrying mu_m
    MeasureEstimate est;
    est.m = m;
    est.method = "steiner";
    est.value = c[k - 1] / alpha_volume(k);
    est.stderr_ = std::sqrt(std::max(0.0, cov(k - 1, k - 1) * scale2)) / alpha_volume(k);
    out.push_back(est);
  }
  std::reverse(out.begin(), out.end());  // index by m ascending
  return out;
}

CoareaResult coarea_check(const Scene& scene, int m, const BundleFunction& f,
                          const BundleConfig& bundle_cfg,
                          const StratifiedConfig& strat_cfg,
                          const Tolerances& tols) {
  CoareaResult res;

  LiftStats stats;
  std::vector<BundlePoint> pts =
      bundle_with_strata(scene, bundle_cfg, strat_cfg.strata, tols, &stats);
  MeasureEstimate lhs = integrate_bundle(pts, [&](const BundlePoint& p) {
    if (p.stratum != m) return 0.0;
    double prod = 1.0;
    for (int i = 0; i < m; ++i) {
      double k = p.kappa[i];
      prod *= is_infinite(k) ? 0.0 : 1.0 / std::sqrt(1.0 + k * k);
    }
    return f(p.a, p.u) * prod;
  });
  res.lhs = lhs.value;

  double rhs = 0;
  std::vector<StratumSample> samples = validated_samples(scene, m, strat_cfg);
  for (const StratumSample& s : samples) {
    double acc = 0;
    for (std::size_t k = 0; k < s.fiber_dirs.size(); ++k)
      acc += f(s.z, s.fiber_dirs[k]) * s.fiber_w[k];
    rhs += acc * s.w_base;
  }
  res.rhs = rhs;
  res.rel_gap = std::abs(res.lhs - res.rhs) / std::max(std::abs(res.rhs), 1e-12);
  return res;
}

double infinite_curvature_census(const std::vector<BundlePoint>& labeled,
                                 const Selector& S, int j, int m) {
  if (m < 1) throw InvalidIndex("infinite_curvature_census: m must be >= 1");
  double total = 0, flagged = 0;
  for (const BundlePoint& p : labeled) {
    if (p.stratum != j || !S(p.a, p.u)) continue;
    total += p.weight;
    if (m - 1 < static_cast<int>(p.kappa.size()) && is_infinite(p.kappa[m - 1]))
      flagged += p.weight;
  }
  return total > 0 ? flagged / total : 0.0;
}

}  // namespace curvmeas
