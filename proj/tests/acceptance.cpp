// Acceptance suite: one numbered criterion per invocation argument, each
// printing a single [PASS]/[FAIL] line. Run with no arguments for all.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "curvmeas/bundle.hpp"
#include "curvmeas/curvature.hpp"
#include "curvmeas/differential.hpp"
#include "curvmeas/measures.hpp"
#include "curvmeas/oracle.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/rng.hpp"
#include "curvmeas/scene.hpp"
#include "curvmeas/strata.hpp"

using namespace curvmeas;

namespace {

const Tolerances kT;

struct Outcome {
  bool pass = true;
  std::string detail;
};

Scene disc() { return Scene(2, {make_ball(make_vec({0, 0}), 1.0)}, 2.0); }
Scene square() {
  return Scene(2, {make_axis_box(make_vec({0, 0}), make_vec({1, 1}))}, 2.0);
}
Scene segment2() {
  return Scene(2, {make_segment(make_vec({-1, 0}), make_vec({1, 0}))}, 2.0);
}
Scene point_origin() { return Scene(2, {make_point(make_vec({0, 0}))}, 2.0); }
Scene two_points() {
  return Scene(2, {make_point_cloud({make_vec({-1, 0}), make_vec({1, 0})})}, 2.0);
}
Scene ball_complement() {
  return Scene(2, {make_ball_complement(make_vec({0, 0}), 1.0)}, 2.0);
}
Scene ball3() { return Scene(3, {make_ball(make_vec({0, 0, 0}), 1.0)}, 2.0); }

// ---------------------------------------------------------------- criterion 1
Outcome criterion1() {
  Outcome o;
  std::ostringstream d;
  for (double r : {0.2, 0.5, 0.9}) {
    CurvatureData c = curvature_at(disc(), make_vec({1, 0}), make_vec({1, 0}), r, kT);
    double err = std::abs(c.kappa[0] - 1.0);
    d << "disc r=" << r << " err=" << err << "; ";
    if (err > 1e-3) o.pass = false;
  }
  for (double r : {0.1, 0.25}) {
    CurvatureData c =
        curvature_at(ball_complement(), make_vec({1, 0}), make_vec({-1, 0}), r, kT);
    double err = std::abs(c.kappa[0] - (-1.0));
    d << "complement r=" << r << " err=" << err << "; ";
    if (err > 1e-3) o.pass = false;
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion2() {
  Outcome o;
  std::ostringstream d;
  {
    SmoothSurface s = SmoothSurface::sphere(make_vec({0, 0, 0}), 2.0);
    SmoothCompareResult res =
        compare_with_smooth(s, make_vec({2, 0, 0}), make_vec({1, 0, 0}), 0.5, kT);
    double e1 = std::abs(res.kappa[0] - 0.5), e2 = std::abs(res.kappa[1] - 0.5);
    d << "sphere kappa errs=" << e1 << "," << e2 << " q_res=" << res.q_residual << "; ";
    if (e1 > 1e-3 || e2 > 1e-3 || res.q_residual > 1e-2) o.pass = false;
  }
  {
    SmoothSurface s = SmoothSurface::torus(2.0, 0.5);
    SmoothCompareResult res =
        compare_with_smooth(s, make_vec({2.5, 0, 0}), make_vec({1, 0, 0}), 0.2, kT);
    double e1 = std::abs(res.kappa[0] - 0.4), e2 = std::abs(res.kappa[1] - 2.0);
    d << "torus kappa errs=" << e1 << "," << e2 << " q_res=" << res.q_residual;
    if (e1 > 1e-2 || e2 > 1e-2 || res.q_residual > 1e-2) o.pass = false;
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion3() {
  Outcome o;
  std::vector<Scene> scenes = {disc(),       square(),          segment2(),
                               two_points(), ball_complement(), ball3()};
  const int per_scene = 167;
  int total = 0, sym_ok = 0;
  double worst_tu = 0, worst_id = 0, worst_chain = 0, worst_eig = 0;
  std::uint64_t h = 2024;
  for (Scene& scene : scenes) {
    Vec lo, hi;
    scene.bbox(lo, hi);
    int found = 0;
    for (int tries = 0; tries < per_scene * 60 && found < per_scene; ++tries) {
      Vec x(scene.dim());
      for (int i = 0; i < scene.dim(); ++i)
        x[i] = lo[i] + (hi[i] - lo[i]) * hash_unit(h = splitmix64(h));
      if (scene.delta(x) < 5e-2) continue;
      RegularityResult reg = is_regular(scene, x, kT);
      if (!reg.regular) continue;
      DiffFrame f;
      DiffDiagnostics diag;
      try {
        f = jacobians(scene, reg, kT.step_factor, kT);
        diag = check_differential_identities(scene, f, 0.5, kT);
      } catch (const Error&) {
        continue;
      }
      ++found;
      ++total;
      worst_tu = std::max(worst_tu, diag.dxi_t_u);
      worst_id = std::max(worst_id, diag.identity_residual);
      worst_chain = std::max(worst_chain, diag.chain_residual);
      if (f.sym_residual <= 1e-4) ++sym_ok;
      Eigen::SelfAdjointEigenSolver<Mat> es(Mat(0.5 * (f.Dxi + f.Dxi.transpose())));
      double ub = is_infinite(f.rho) ? 1.0 : f.rho / (f.rho - 1.0);
      for (int i = 0; i < scene.dim(); ++i) {
        worst_eig = std::max(worst_eig, -1e-6 - es.eigenvalues()[i] + 1e-6);
        worst_eig = std::max(worst_eig, es.eigenvalues()[i] - ub);
        if (es.eigenvalues()[i] < -1e-6 || es.eigenvalues()[i] > ub + 1e-6)
          o.pass = false;
      }
    }
  }
  std::ostringstream d;
  d << "points=" << total << " worst: dxi_t_u=" << worst_tu
    << " identity=" << worst_id << " chain=" << worst_chain
    << " eig_excess=" << worst_eig << " presym_ok=" << sym_ok << "/" << total;
  if (total < 1000) o.pass = false;
  if (worst_tu > 1e-5 || worst_id > 1e-5 || worst_chain > 1e-4) o.pass = false;
  if (sym_ok < (total * 99) / 100) o.pass = false;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion4() {
  Outcome o;
  std::ostringstream d;
  BundleConfig cfg;
  cfg.grid_res = 512;
  {
    cfg.r = 0.5;
    auto pts = sample_bundle(disc(), cfg, kT, nullptr);
    double total = 0;
    for (const BundlePoint& p : pts) total += p.weight;
    double expect = 2 * M_PI * std::sqrt(2.0);
    double rel = std::abs(total - expect) / expect;
    d << "disc total=" << total << " rel=" << rel << "; ";
    if (rel > 0.01) o.pass = false;
  }
  {
    cfg.r = 1.0;
    auto pts = sample_bundle(point_origin(), cfg, kT, nullptr);
    double total = 0;
    for (const BundlePoint& p : pts) total += p.weight;
    double rel = std::abs(total - 2 * M_PI) / (2 * M_PI);
    d << "point total=" << total << " rel=" << rel;
    if (rel > 0.01) o.pass = false;
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion5() {
  Outcome o;
  std::ostringstream d;
  struct Case {
    const char* name;
    Scene scene;
    double mu1, mu0;
  };
  std::vector<Case> cases = {{"disc", disc(), M_PI, 1.0},
                             {"square", square(), 2.0, 1.0},
                             {"segment", segment2(), 2.0, 1.0}};
  std::vector<double> radii = {0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  for (Case& cs : cases) {
    BundleConfig bc;
    bc.r = 0.5;
    bc.grid_res = 512;
    LiftStats stats;
    auto pts = sample_bundle(cs.scene, bc, kT, &stats);
    StratifiedConfig sc;
    sc.density = 512;
    auto steiner = steiner_fit(cs.scene, radii, 1024);
    for (int m : {0, 1}) {
      double analytic = m == 1 ? cs.mu1 : cs.mu0;
      MeasureEstimate g = mu_global_on(pts, m, select_all, 2, stats.dropped_area);
      MeasureEstimate s = mu_stratified(cs.scene, m, select_all, sc, kT);
      MeasureEstimate t = steiner[m];
      for (const MeasureEstimate* e : {&g, &s, &t}) {
        double rel = std::abs(e->value - analytic) / std::abs(analytic);
        if (rel > 0.02) {
          o.pass = false;
          d << cs.name << " m=" << m << " " << e->method << " rel=" << rel << "! ";
        }
      }
      auto pairgap = [&](const MeasureEstimate& a, const MeasureEstimate& b) {
        double gap = std::abs(a.value - b.value);
        double comb = 3 * std::hypot(a.stderr_, b.stderr_);
        if (gap > comb) {
          o.pass = false;
          d << cs.name << " m=" << m << " " << a.method << "/" << b.method
            << " gap=" << gap << ">" << comb << "! ";
        }
      };
      pairgap(g, s);
      pairgap(g, t);
      pairgap(s, t);
      d << cs.name << " m=" << m << " g=" << g.value << " s=" << s.value
        << " st=" << t.value << "; ";
    }
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion6() {
  Outcome o;
  std::ostringstream d;
  BundleConfig bc;
  bc.r = 0.5;
  bc.grid_res = 512;
  StratifiedConfig sc;
  sc.density = 512;
  auto one = [](const Vec&, const Vec&) { return 1.0; };
  auto upper = [](const Vec&, const Vec& u) { return u[1] > 0.5 ? 1.0 : 0.0; };

  auto run = [&](const char* name, const Scene& scene, const BundleFunction& f) {
    CoareaResult r = coarea_check(scene, 1, f, bc, sc, kT);
    d << name << " lhs=" << r.lhs << " rhs=" << r.rhs << " gap=" << r.rel_gap << "; ";
    if (r.rel_gap > 0.02) o.pass = false;
  };
  run("square", square(), one);
  run("disc", disc(), one);
  run("segment(f=1)", segment2(), one);
  run("segment(indicator)", segment2(), upper);
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion7() {
  Outcome o;
  std::ostringstream d;
  Scene sq = square();
  StrataConfig cfg;
  int correct = 0, total = 0;
  for (const Vec& corner : {make_vec({0, 0}), make_vec({1, 0}), make_vec({0, 1}),
                            make_vec({1, 1})}) {
    ++total;
    if (classify_stratum(sq, corner, cfg).m == 0) ++correct;
  }
  std::uint64_t h = 31;
  for (int k = 0; k < 96; ++k) {
    double t = 0.05 + 0.9 * hash_unit(h = splitmix64(h));
    Vec pts[4] = {make_vec({t, 0}), make_vec({t, 1}), make_vec({0, t}),
                  make_vec({1, t})};
    Vec z = pts[k % 4];
    ++total;
    if (classify_stratum(sq, z, cfg).m == 1) ++correct;
  }
  d << "square classify " << correct << "/" << total << "; ";
  if (correct < (total * 95) / 100) o.pass = false;

  BundleConfig bc;
  bc.r = 0.5;
  bc.grid_res = 512;
  StrataConfig sc;
  {
    auto pts = bundle_with_strata(sq, bc, sc, kT, nullptr);
    double frac = infinite_curvature_census(pts, select_all, 0, 1);
    d << "square corner census=" << frac << "; ";
    if (std::abs(frac - 1.0) > 0.01) o.pass = false;
  }
  {
    auto pts = bundle_with_strata(segment2(), bc, sc, kT, nullptr);
    double frac = infinite_curvature_census(pts, select_all, 0, 1);
    d << "segment endpoint census=" << frac << "; ";
    if (std::abs(frac - 1.0) > 0.01) o.pass = false;
  }
  {
    auto pts = bundle_with_strata(disc(), bc, sc, kT, nullptr);
    double frac = infinite_curvature_census(pts, select_all, 1, 1);
    d << "disc census=" << frac;
    if (frac > 0.01) o.pass = false;
  }
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion8() {
  Outcome o;
  std::ostringstream d;
  struct Case {
    const char* name;
    Scene scene;
    double r;
  };
  std::vector<Case> cases = {{"disc", disc(), 0.5},
                             {"square", square(), 0.5},
                             {"segment", segment2(), 0.5},
                             {"two_points", two_points(), 0.4},
                             {"complement", ball_complement(), 0.4},
                             {"ball3", ball3(), 0.5}};
  double worst = -kInfinity;
  int evaluated = 0;
  for (Case& cs : cases) {
    BundleConfig bc;
    bc.r = cs.r;
    bc.grid_res = cs.scene.dim() == 2 ? 192 : 48;
    auto pts = sample_bundle(cs.scene, bc, kT, nullptr);
    for (const BundlePoint& p : pts) {
      double r_eval =
          is_infinite(p.reach) ? p.r_src : std::min(p.r_src, 0.45 * p.reach);
      CurvatureData c;
      try {
        c = curvature_at(cs.scene, p.a, p.u, r_eval, kT);
      } catch (const Error&) {
        continue;
      }
      ++evaluated;
      if (c.m == 0) continue;
      Eigen::SelfAdjointEigenSolver<Mat> es(c.Q);
      double lower = is_infinite(c.reach) ? 0.0 : -1.0 / c.reach;
      worst = std::max(worst, lower - es.eigenvalues()[0]);
    }
  }
  d << "evaluated=" << evaluated << " worst_violation=" << worst;
  if (evaluated < 500 || worst > 1e-4) o.pass = false;
  o.detail = d.str();
  return o;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion9() {
  Outcome o;
  std::string scene_path = std::string(CURVMEAS_SCENES_DIR) + "/square.json";
  std::string o1 = "/tmp/curvmeas_acc9_1.txt", o2 = "/tmp/curvmeas_acc9_2.txt";
  std::string base = std::string(CURVMEAS_BIN) + " checks --scene " + scene_path +
                     " --grid-res 96 --seed 7 --out ";
  int rc1 = std::system((base + o1 + " >/dev/null 2>&1").c_str());
  int rc2 = std::system((base + o2 + " >/dev/null 2>&1").c_str());
  auto slurp = [](const std::string& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  std::string t1 = slurp(o1), t2 = slurp(o2);
  o.pass = WEXITSTATUS(rc1) == 0 && WEXITSTATUS(rc2) == 0 && !t1.empty() && t1 == t2;
  std::ostringstream d;
  d << "exit=" << WEXITSTATUS(rc1) << "," << WEXITSTATUS(rc2)
    << " bytes=" << t1.size() << (t1 == t2 ? " identical" : " DIFFER");
  o.detail = d.str();
  std::remove(o1.c_str());
  std::remove(o2.c_str());
  return o;
}

// --------------------------------------------------------------- criterion 10
Outcome criterion10() {
  Outcome o;
  std::ostringstream d;
  struct Case {
    const char* name;
    Scene scene;
  };
  std::vector<Case> cases = {{"disc", disc()}, {"square", square()},
                             {"segment", segment2()}};
  std::vector<double> radii = {0.15, 0.2, 0.25, 0.3, 0.35, 0.4};
  for (Case& cs : cases) {
    for (int m : {0, 1}) {
      BundleConfig c1;
      c1.r = 0.5;
      c1.grid_res = 256;
      BundleConfig c2 = c1;
      c2.grid_res = 512;
      double g1 = mu_global(cs.scene, m, select_all, c1, kT).value;
      double g2 = mu_global(cs.scene, m, select_all, c2, kT).value;
      double rel = std::abs(g1 - g2) / std::max(std::abs(g2), 1e-12);
      d << cs.name << " m=" << m << " global_rel=" << rel << "; ";
      if (rel > 0.01) o.pass = false;

      double s1 = steiner_fit(cs.scene, radii, 512)[m].value;
      double s2 = steiner_fit(cs.scene, radii, 1024)[m].value;
      rel = std::abs(s1 - s2) / std::max(std::abs(s2), 1e-12);
      d << cs.name << " m=" << m << " steiner_rel=" << rel << "; ";
      if (rel > 0.01) o.pass = false;
    }
  }
  o.detail = d.str();
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::map<int, std::function<Outcome()>> criteria = {
      {1, criterion1}, {2, criterion2}, {3, criterion3}, {4, criterion4},
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {8, criterion8},
      {9, criterion9}, {10, criterion10}};
  static const std::map<int, std::string> names = {
      {1, "curvature transformation r-independence"},
      {2, "smooth second-fundamental-form agreement"},
      {3, "differential identities at seeded regular points"},
      {4, "total normal-bundle measure"},
      {5, "support measures three-way agreement"},
      {6, "coarea identity"},
      {7, "stratification and infinite-curvature census"},
      {8, "Q lower bound via the reach"},
      {9, "deterministic reports"},
      {10, "grid convergence of reported measures"}};

  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty())
    for (auto& [k, fn] : criteria) selected.push_back(k);

  int failures = 0;
  for (int k : selected) {
    auto it = criteria.find(k);
    if (it == criteria.end()) {
      std::cerr << "unknown criterion " << k << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << k << ": "
              << names.at(k) << " — " << o.detail << "\n";
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
