#include "curvmeas/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "curvmeas/bundle.hpp"
#include "curvmeas/curvature.hpp"
#include "curvmeas/differential.hpp"
#include "curvmeas/measures.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/report.hpp"
#include "curvmeas/rng.hpp"
#include "curvmeas/strata.hpp"

namespace curvmeas {

namespace {

Vec random_point(const Scene& scene, std::uint64_t h) {
  Vec lo, hi;
  scene.bbox(lo, hi);
  Vec x(scene.dim());
  for (int i = 0; i < scene.dim(); ++i)
    x[i] = lo[i] + (hi[i] - lo[i]) * hash_unit(splitmix64(h + 0x517cc1b7u * (i + 1)));
  return x;
}

// Seeded sample of regular points with their frames.
std::vector<DiffFrame> sample_regular_frames(const Scene& scene,
                                             const ChecksConfig& cfg,
                                             int want) {
  std::vector<DiffFrame> frames;
  std::uint64_t h = cfg.seed;
  for (int tries = 0; tries < want * 40 && static_cast<int>(frames.size()) < want;
       ++tries) {
    h = splitmix64(h);
    Vec x = random_point(scene, h);
    if (scene.delta(x) < 1e-3) continue;
    RegularityResult reg = is_regular(scene, x, cfg.tols);
    if (!reg.regular) continue;
    try {
      frames.push_back(jacobians(scene, reg, cfg.tols.step_factor, cfg.tols));
    } catch (const Error&) {
    }
  }
  return frames;
}

struct Collector {
  std::vector<CheckResult> results;
  void add(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
};

}  // namespace

std::vector<CheckResult> run_checks(const Scene& scene, const ChecksConfig& cfg) {
  Collector c;
  const Tolerances& tols = cfg.tols;
  const int n = scene.dim();

  // --- scene invariants ---
  {
    double worst = 0;
    std::uint64_t h = cfg.seed ^ 0xa5a5a5a5ull;
    for (int k = 0; k < 500; ++k) {
      Vec x = random_point(scene, h = splitmix64(h));
      Vec y = random_point(scene, h = splitmix64(h));
      double lhs = std::abs(scene.delta(x) - scene.delta(y));
      worst = std::max(worst, lhs - (x - y).norm());
    }
    c.add("scene.delta_lipschitz", worst <= 1e-12, "excess=" + fmt_double(worst));
  }
  {
    bool ok = true;
    double worst = 0;
    std::uint64_t h = cfg.seed ^ 0xbeefull;
    for (int k = 0; k < 200; ++k) {
      Vec x = random_point(scene, h = splitmix64(h));
      double d = scene.delta(x);
      if (d <= 1e-6) continue;
      for (const Vec& a : scene.nearest_set(x, tols.proj)) {
        worst = std::max({worst, scene.delta(a), (x - a).norm() - d - tols.proj});
        if (scene.delta(a) > tols.proj || (x - a).norm() > d + tols.proj) ok = false;
      }
    }
    c.add("scene.nearest_set_contract", ok, "worst=" + fmt_double(worst));
  }
  {
    double worst = 0;
    std::uint64_t h = cfg.seed ^ 0xc0ffeeull;
    for (int k = 0; k < 200; ++k) {
      Vec x = random_point(scene, h = splitmix64(h));
      double mindist = kInfinity;
      for (const auto& s : scene.shapes()) mindist = std::min(mindist, s->distance(x));
      worst = std::max(worst, std::abs(mindist - scene.delta(x)));
    }
    c.add("scene.union_is_min", worst == 0.0, "gap=" + fmt_double(worst));
  }

  // --- projection invariants ---
  std::vector<DiffFrame> frames = sample_regular_frames(scene, cfg, cfg.sample_points);
  c.add("projection.regular_points_found", !frames.empty(),
        "count=" + std::to_string(frames.size()));
  {
    double worst_xi = 0, worst_rho = 0, worst_reach = 0;
    int used = 0;
    for (std::size_t i = 0; i < frames.size() && used < 60; ++i) {
      const DiffFrame& f = frames[i];
      double rx = f.rho;
      double tcap = is_infinite(rx) ? 2.0 : std::min(2.0, 0.9 * rx);
      for (double t : {0.5 * tcap, 0.9 * tcap}) {
        DilateResult dr = dilate(scene, f.x, t, tols.proj);
        std::optional<ProjectedPoint> q = psi(scene, dr.point, tols.proj);
        if (!q) continue;
        worst_xi = std::max(worst_xi, (q->a - f.a).norm());
        double rt = rho(scene, dr.point, tols.t_max, tols.ray);
        if (!is_infinite(rx) && !is_infinite(rt))
          worst_rho = std::max(worst_rho, std::abs(rt * t - rx) / rx);
      }
      double reach = reach_function(scene, f.a, f.u, tols.s_max, tols.ray);
      if (!is_infinite(reach) && !is_infinite(rx))
        worst_reach = std::max(worst_reach, std::abs(reach - f.delta * rx));
      ++used;
    }
    c.add("projection.xi_constant_on_rays", worst_xi <= 1e-9,
          "worst=" + fmt_double(worst_xi));
    c.add("projection.rho_dilation_identity", worst_rho <= 1e-6,
          "worst_rel=" + fmt_double(worst_rho));
    c.add("projection.reach_equals_delta_rho", worst_reach <= 1e-6,
          "worst=" + fmt_double(worst_reach));
  }
  {
    // Lip(xi|A_lambda) <= lambda/(lambda-1)
    double worst = 0;
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < frames.size() && pairs < 300; ++i)
      for (std::size_t j = i + 1; j < frames.size() && pairs < 300; ++j) {
        const DiffFrame &a = frames[i], &b = frames[j];
        double lam = std::min(is_infinite(a.rho) ? kInfinity : a.rho,
                              is_infinite(b.rho) ? kInfinity : b.rho);
        double bound = is_infinite(lam) ? 1.0 : lam / (lam - 1.0);
        double lhs = (a.a - b.a).norm();
        double rhs = bound * (a.x - b.x).norm() * (1.0 + 1e-6);
        worst = std::max(worst, lhs - rhs);
        ++pairs;
      }
    c.add("projection.lipschitz_on_A_lambda", worst <= 1e-9,
          "excess=" + fmt_double(worst));
  }

  // --- differential invariants ---
  {
    double worst_tu = 0, worst_id = 0, worst_eig = 0, worst_chi = 0;
    int sym_ok = 0;
    for (const DiffFrame& f : frames) {
      worst_tu = std::max(worst_tu, (f.Dxi.transpose() * f.u).norm());
      worst_id = std::max(worst_id, f.identity_residual);
      if (f.sym_residual <= 1e-4) ++sym_ok;
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (f.Dxi + f.Dxi.transpose())));
      double lam = is_infinite(f.rho) ? kInfinity : f.rho;
      double ub = is_infinite(lam) ? 1.0 : lam / (lam - 1.0);
      for (int i = 0; i < n; ++i) {
        worst_eig = std::max(worst_eig, -es.eigenvalues()[i]);
        worst_eig = std::max(worst_eig, es.eigenvalues()[i] - ub);
      }
      double lo_chi = is_infinite(lam) ? 0.0 : 1.0 / ((lam - 1.0) * f.delta);
      for (double ch : f.chi) {
        worst_chi = std::max(worst_chi, ch - 1.0 / f.delta);
        worst_chi = std::max(worst_chi, -lo_chi - ch);
      }
    }
    c.add("differential.dxi_perp_u", worst_tu <= 1e-5, "worst=" + fmt_double(worst_tu));
    c.add("differential.identity_residual", worst_id <= 1e-5,
          "worst=" + fmt_double(worst_id));
    c.add("differential.eigenvalue_ranges", worst_eig <= 1e-6 && worst_chi <= 1e-6,
          "dxi_excess=" + fmt_double(worst_eig) + " chi_excess=" + fmt_double(worst_chi));
    c.add("differential.presym_residual_99pct",
          frames.empty() || sym_ok >= static_cast<int>(frames.size() * 99) / 100,
          std::to_string(sym_ok) + "/" + std::to_string(frames.size()));
  }
  {
    // r-coherence: transformed chi agree along the same normal ray
    double worst = 0;
    int used = 0;
    for (const DiffFrame& f : frames) {
      if (used >= 40) break;
      double reach = is_infinite(f.rho) ? kInfinity : f.delta * f.rho;
      double r1 = f.delta;
      double r2 = is_infinite(reach) ? 2.0 * f.delta : 0.5 * (r1 + 0.9 * reach);
      if (!(r2 > r1 * 1.05)) continue;
      Vec x2 = f.a + r2 * f.u;
      RegularityResult reg2 = is_regular(scene, x2, tols);
      if (!reg2.regular) continue;
      DiffFrame g = jacobians(scene, reg2, tols.step_factor, tols);
      for (int i = 0; i < n - 1; ++i) {
        double k1 = kappa_from_chi(f.chi[i], r1, tols.sing * r1);
        double k2 = kappa_from_chi(g.chi[i], r2, tols.sing * r2);
        if (is_infinite(k1) != is_infinite(k2)) {
          worst = std::max(worst, 1.0);
        } else if (!is_infinite(k1)) {
          worst = std::max(worst, std::abs(k1 - k2) / (1.0 + std::abs(k1)));
        }
      }
      ++used;
    }
    c.add("differential.r_coherence", worst <= 10 * tols.diff,
          "worst_rel=" + fmt_double(worst));
  }
  {
    // step-halving convergence with observed order >= 1.5 where the
    // truncation signal stands above roundoff
    double worst_order = kInfinity;
    int used = 0;
    for (const DiffFrame& f : frames) {
      if (used >= 20) break;
      double h0 = 10 * tols.step_factor;
      DiffFrame fa, fb, fc;
      try {
        fa = jacobians(scene, f.x, h0, tols);
        fb = jacobians(scene, f.x, h0 / 2, tols);
        fc = jacobians(scene, f.x, h0 / 4, tols);
      } catch (const Error&) {
        continue;
      }
      for (int i = 0; i < n - 1; ++i) {
        double d1 = std::abs(fa.chi[i] - fb.chi[i]);
        double d2 = std::abs(fb.chi[i] - fc.chi[i]);
        if (d1 < 1e-10 || d2 < 1e-12) continue;  // flat to machine precision
        worst_order = std::min(worst_order, std::log2(d1 / d2));
        ++used;
      }
    }
    c.add("differential.step_halving_order",
          used == 0 || worst_order >= 1.5,
          used == 0 ? "flat-exact" : "min_order=" + fmt_double(worst_order));
  }

  // --- bundle invariants ---
  BundleConfig bc;
  bc.r = cfg.r;
  bc.grid_res = cfg.grid_res;
  bc.seed = cfg.seed;
  LiftStats stats;
  std::vector<BundlePoint> pts;
  bool have_bundle = true;
  try {
    pts = sample_bundle(scene, bc, tols, &stats);
  } catch (const EmptyLevelSet&) {
    have_bundle = false;
  }
  if (have_bundle) {
    Vec lo, hi;
    scene.bbox(lo, hi);
    const double cell = (hi - lo).maxCoeff() / cfg.grid_res;
    {
      bool ok = true;
      for (const BundlePoint& p : pts)
        if (!(p.weight > 0)) ok = false;
      c.add("bundle.weight_positive", ok, "count=" + std::to_string(pts.size()));
    }
    {
      // monotone coverage: everything found at r reappears at r/2
      BundleConfig bc2 = bc;
      bc2.r = bc.r / 2;
      std::vector<BundlePoint> finer = sample_bundle(scene, bc2, tols, nullptr);
      int missed = 0;
      int examined = 0;
      for (std::size_t i = 0; i < pts.size(); i += std::max<std::size_t>(1, pts.size() / 200)) {
        const BundlePoint& p = pts[i];
        ++examined;
        double best = kInfinity;
        for (const BundlePoint& q : finer)
          best = std::min(best,
                          (p.a - q.a).norm() + bc2.r * (p.u - q.u).norm());
        if (best > 2.5 * cell) ++missed;
      }
      c.add("bundle.monotone_coverage", missed == 0,
            std::to_string(missed) + "/" + std::to_string(examined) + " missed");
    }
    {
      MeasureEstimate total = integrate_bundle(pts, [](const BundlePoint&) { return 1.0; });
      BundleConfig bc2 = bc;
      bc2.grid_res = cfg.grid_res * 2;
      std::vector<BundlePoint> pts2 = sample_bundle(scene, bc2, tols, nullptr);
      MeasureEstimate total2 =
          integrate_bundle(pts2, [](const BundlePoint&) { return 1.0; });
      double rel = std::abs(total.value - total2.value) / std::max(total2.value, 1e-12);
      c.add("bundle.grid_refinement", rel < 0.01, "rel_change=" + fmt_double(rel));
    }
    {
      // exceptional-radius mitigation: jitter r by 1% and compare totals
      BundleConfig bcj = bc;
      bcj.r_jitter = 0.01;
      std::vector<BundlePoint> ptsj = sample_bundle(scene, bcj, tols, nullptr);
      MeasureEstimate t0 = integrate_bundle(pts, [](const BundlePoint&) { return 1.0; });
      MeasureEstimate t1 = integrate_bundle(ptsj, [](const BundlePoint&) { return 1.0; });
      double rel = std::abs(t0.value - t1.value) / std::max(t0.value, 1e-12);
      c.add("bundle.r_jitter_stability", rel < 0.02, "rel=" + fmt_double(rel));
    }

    // --- strata invariants ---
    StrataConfig sc;
    sc.seed = cfg.seed;
    label_strata(scene, pts, sc, cell);
    {
      double total = 0;
      std::vector<double> per_m(n + 1, 0.0);
      bool in_range = true;
      for (const BundlePoint& p : pts) {
        total += p.weight;
        if (p.stratum < 0 || p.stratum > n - 1) {
          in_range = false;
        } else {
          per_m[p.stratum] += p.weight;
        }
      }
      double sum = 0;
      for (int m = 0; m <= n - 1; ++m) sum += per_m[m];
      bool ok = in_range && std::abs(sum - total) <= 5e-3 * std::max(total, 1e-12);
      c.add("strata.partition_weights", ok,
            "sum=" + fmt_double(sum) + " total=" + fmt_double(total));
    }
    {
      // kappa_{m+1} = inf on stratum m (>= 99% of weight)
      // points relabeled by the corner-exclusion rule sit inside the known
      // grid-ambiguity band and are excluded from the pattern audit
      bool ok = true;
      std::ostringstream detail;
      for (int m = 0; m <= n - 2; ++m) {
        double tot = 0, good = 0;
        for (const BundlePoint& p : pts) {
          if (p.stratum != m || p.stratum_forced) continue;
          tot += p.weight;
          if (is_infinite(p.kappa[m])) good += p.weight;  // kappa_{m+1}, 0-based
        }
        if (tot > 0) {
          double frac = good / tot;
          detail << "m" << m << "=" << fmt_double(frac) << " ";
          if (frac < 0.99) ok = false;
        }
      }
      double tot = 0, fin = 0;
      for (const BundlePoint& p : pts) {
        if (p.stratum != n - 1 || p.stratum_forced) continue;
        tot += p.weight;
        if (!is_infinite(p.kappa[n - 2])) fin += p.weight;
      }
      if (tot > 0) {
        double frac = fin / tot;
        detail << "finite_top=" << fmt_double(frac);
        if (frac < 0.99) ok = false;
      }
      c.add("strata.infinity_patterns", ok, detail.str());
    }

    // --- curvature invariants ---
    {
      double worst = -kInfinity;
      int used = 0;
      for (std::size_t i = 0; i < pts.size() && used < 60;
           i += std::max<std::size_t>(1, pts.size() / 60)) {
        const BundlePoint& p = pts[i];
        double r_eval = is_infinite(p.reach) ? p.r_src : std::min(p.r_src, 0.45 * p.reach);
        try {
          CurvatureData cd = curvature_at(scene, p.a, p.u, r_eval, tols);
          if (cd.m > 0) {
            Eigen::SelfAdjointEigenSolver<Mat> es(cd.Q);
            double bound = is_infinite(cd.reach) ? 0.0 : -1.0 / cd.reach;
            worst = std::max(worst, bound - es.eigenvalues()[0]);
          }
          ++used;
        } catch (const Error&) {
        }
      }
      c.add("curvature.q_lower_bound", used == 0 || worst <= 1e-4,
            "excess=" + (used ? fmt_double(worst) : std::string("n/a")));
    }

    // --- measures invariants ---
    {
      Selector upper = [](const Vec&, const Vec& u) { return u[u.size() - 1] >= 0; };
      Selector lower = [](const Vec&, const Vec& u) { return u[u.size() - 1] < 0; };
      bool ok = true;
      std::ostringstream detail;
      for (int m = 0; m <= n - 1; ++m) {
        MeasureEstimate all = mu_global_on(pts, m, select_all, n);
        MeasureEstimate up = mu_global_on(pts, m, upper, n);
        MeasureEstimate dn = mu_global_on(pts, m, lower, n);
        double gap = std::abs(all.value - up.value - dn.value);
        detail << "m" << m << "_gap=" << fmt_double(gap) << " ";
        if (gap > 1e-9 * std::max(1.0, std::abs(all.value))) ok = false;
      }
      c.add("measures.additivity", ok, detail.str());
    }
    {
      StratifiedConfig stc;
      stc.strata.seed = cfg.seed;
      stc.density = 256;
      bool ok = true;
      std::ostringstream detail;
      for (int m = 0; m <= n - 1; ++m) {
        MeasureEstimate g = mu_global_on(pts, m, select_all, n, stats.dropped_area);
        MeasureEstimate s = mu_stratified(scene, m, select_all, stc, tols);
        if (s.method == "stratified(empty)" && s.value == 0) continue;
        double tol3 = 3 * std::hypot(g.stderr_, s.stderr_) +
                      0.02 * std::max({std::abs(g.value), std::abs(s.value), 1e-9});
        double gap = std::abs(g.value - s.value);
        detail << "m" << m << "=" << fmt_double(gap) << "/" << fmt_double(tol3) << " ";
        if (gap > tol3) ok = false;
      }
      c.add("measures.global_vs_stratified", ok, detail.str());
    }
    {
      std::vector<double> radii;
      for (double rr : {0.3, 0.4, 0.5, 0.6, 0.7}) radii.push_back(cfg.r * rr);
      bool ok = true;
      std::string detail;
      try {
        std::vector<MeasureEstimate> st = steiner_fit(scene, radii, cfg.grid_res * 2);
        std::ostringstream d;
        for (int m = 0; m <= n - 1; ++m) {
          MeasureEstimate g = mu_global_on(pts, m, select_all, n);
          double tol3 = 3 * std::hypot(g.stderr_, st[m].stderr_) +
                        0.02 * std::max({std::abs(g.value), std::abs(st[m].value), 1e-9});
          double gap = std::abs(g.value - st[m].value);
          d << "m" << m << "=" << fmt_double(gap) << "/" << fmt_double(tol3) << " ";
          if (gap > tol3) ok = false;
        }
        detail = d.str();
      } catch (const ReachTooSmall&) {
        detail = "skipped: reach too small for the Steiner radii";
      } catch (const Error& e) {
        detail = std::string("skipped: ") + e.what();
      }
      c.add("measures.global_vs_steiner", ok, detail);
    }
    {
      // determinism: identical config, identical bytes
      std::vector<BundlePoint> again = sample_bundle(scene, bc, tols, nullptr);
      std::ostringstream s1, s2;
      for (const BundlePoint& p : pts)
        s1 << fmt_double(p.weight) << "," << fmt_double(p.a[0]) << ";";
      for (const BundlePoint& p : again)
        s2 << fmt_double(p.weight) << "," << fmt_double(p.a[0]) << ";";
      c.add("determinism.bundle_rerun", s1.str() == s2.str(),
            "hash=" + hex64(fnv1a64(s1.str())));
    }
  } else {
    c.add("bundle.level_set", false, "empty level set at r=" + fmt_double(cfg.r));
  }

  return c.results;
}

std::string format_checks(const std::vector<CheckResult>& results) {
  std::ostringstream out;
  for (const CheckResult& r : results)
    out << (r.pass ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.detail << "\n";
  int failed = 0;
  for (const CheckResult& r : results)
    if (!r.pass) ++failed;
  out << (failed == 0 ? "ALL CHECKS PASSED" : std::to_string(failed) + " CHECKS FAILED")
      << " (" << results.size() << " total)\n";
  return out.str();
}

}  // namespace curvmeas
