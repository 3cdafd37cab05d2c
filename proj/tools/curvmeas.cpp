// curvmeas: curvature measures and normal-bundle geometry of closed sets
// given by exact distance primitives.

#include <cmath>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "curvmeas/bundle.hpp"
#include "curvmeas/checks.hpp"
#include "curvmeas/common.hpp"
#include "curvmeas/curvature.hpp"
#include "curvmeas/measures.hpp"
#include "curvmeas/oracle.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/report.hpp"
#include "curvmeas/rng.hpp"
#include "curvmeas/scene.hpp"
#include "curvmeas/strata.hpp"

namespace {

using curvmeas::BundleConfig;
using curvmeas::BundlePoint;
using curvmeas::fmt_double;
using curvmeas::MeasureEstimate;
using curvmeas::Scene;
using curvmeas::StrataConfig;
using curvmeas::Tolerances;
using curvmeas::Vec;
using json = nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitConfig = 3;

struct Options {
  std::string scene_path;
  std::string out_path;
  int grid_res = 512;
  double r = 0.5;
  std::vector<double> radii;
  int m = -1;  // -1: all
  std::uint64_t seed = 0;
  std::vector<std::string> tol_overrides;
  int shells = 1;
  int density = 512;
  int depth = 4;  // cantor demo
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out_path.empty()) {
    std::cout << text;
  } else {
    curvmeas::write_text_file(opt.out_path, text);
  }
}

Tolerances parse_tols(const Options& opt) {
  Tolerances t;
  for (const std::string& kv : opt.tol_overrides) {
    auto eq = kv.find('=');
    if (eq == std::string::npos)
      throw curvmeas::SceneFormat("--tol expects KEY=VALUE, got: " + kv);
    std::string key = kv.substr(0, eq);
    double val = std::stod(kv.substr(eq + 1));
    if (!t.set_by_name(key, val))
      throw curvmeas::SceneFormat("--tol: unknown key \"" + key + "\"");
  }
  return t;
}

std::string config_hash(const std::string& command, const Options& opt) {
  std::ostringstream s;
  s << command << "|" << opt.scene_path << "|" << opt.grid_res << "|"
    << fmt_double(opt.r) << "|m=" << opt.m << "|seed=" << opt.seed
    << "|shells=" << opt.shells << "|density=" << opt.density << "|radii=";
  for (double r : opt.radii) s << fmt_double(r) << ",";
  for (const std::string& t : opt.tol_overrides) s << "|" << t;
  return curvmeas::hex64(curvmeas::fnv1a64(s.str()));
}

std::vector<BundlePoint> labeled_bundle(const Scene& scene, const Options& opt,
                                        const Tolerances& tols,
                                        curvmeas::LiftStats* stats) {
  BundleConfig bc;
  bc.r = opt.r;
  bc.grid_res = opt.grid_res;
  bc.shells = opt.shells;
  bc.seed = opt.seed;
  StrataConfig sc;
  sc.seed = opt.seed;
  return curvmeas::bundle_with_strata(scene, bc, sc, tols, stats);
}

int cmd_bundle(const Scene& scene, const Options& opt) {
  Tolerances tols = parse_tols(opt);
  curvmeas::LiftStats stats;
  std::vector<BundlePoint> pts = labeled_bundle(scene, opt, tols, &stats);
  const int n = scene.dim();
  std::ostringstream csv;
  csv << "a_x,a_y" << (n == 3 ? ",a_z" : "") << ",u_x,u_y" << (n == 3 ? ",u_z" : "")
      << ",reach,r_src,weight,chi_1" << (n == 3 ? ",chi_2" : "") << ",stratum\n";
  for (const BundlePoint& p : pts) {
    for (int i = 0; i < n; ++i) csv << fmt_double(p.a[i]) << ",";
    for (int i = 0; i < n; ++i) csv << fmt_double(p.u[i]) << ",";
    csv << fmt_double(p.reach) << "," << fmt_double(p.r_src) << ","
        << fmt_double(p.weight);
    for (double chi : p.chi) csv << "," << fmt_double(chi);
    csv << "," << p.stratum << "\n";
  }
  emit(opt, csv.str());
  return 0;
}

int cmd_curvature(const Scene& scene, const Options& opt) {
  Tolerances tols = parse_tols(opt);
  BundleConfig bc;
  bc.r = opt.r;
  bc.grid_res = opt.grid_res;
  bc.shells = opt.shells;
  bc.seed = opt.seed;
  std::vector<BundlePoint> pts = curvmeas::sample_bundle(scene, bc, tols, nullptr);
  const int n = scene.dim();
  std::ostringstream csv;
  csv << "a_x,a_y" << (n == 3 ? ",a_z" : "") << ",u_x,u_y" << (n == 3 ? ",u_z" : "")
      << ",r_eval,m,kappa_1" << (n == 3 ? ",kappa_2" : "") << "\n";
  for (const BundlePoint& p : pts) {
    double r_eval =
        curvmeas::is_infinite(p.reach) ? opt.r : std::min(opt.r, 0.45 * p.reach);
    curvmeas::CurvatureData cd;
    try {
      cd = curvmeas::curvature_at(scene, p.a, p.u, r_eval, tols);
    } catch (const curvmeas::Error&) {
      continue;
    }
    for (int i = 0; i < n; ++i) csv << fmt_double(p.a[i]) << ",";
    for (int i = 0; i < n; ++i) csv << fmt_double(p.u[i]) << ",";
    csv << fmt_double(r_eval) << "," << cd.m;
    for (double k : cd.kappa)
      csv << "," << (curvmeas::is_infinite(k) ? std::string("inf") : fmt_double(k));
    csv << "\n";
  }
  emit(opt, csv.str());
  return 0;
}

int cmd_strata(const Scene& scene, const Options& opt) {
  Tolerances tols = parse_tols(opt);
  std::vector<BundlePoint> pts = labeled_bundle(scene, opt, tols, nullptr);
  StrataConfig sc;
  sc.seed = opt.seed;
  const int n = scene.dim();
  std::ostringstream csv;
  csv << "a_x,a_y" << (n == 3 ? ",a_z" : "") << ",m,dis_dim,confidence\n";
  for (std::size_t i = 0; i < pts.size(); ++i) {
    StrataConfig local = sc;
    local.seed = curvmeas::hash_combine(sc.seed, i);
    curvmeas::StratumLabel lab = curvmeas::classify_stratum(scene, pts[i].a, local);
    for (int k = 0; k < n; ++k) csv << fmt_double(pts[i].a[k]) << ",";
    csv << pts[i].stratum << "," << lab.dis_dim << "," << fmt_double(lab.confidence)
        << "\n";
  }
  emit(opt, csv.str());
  return 0;
}

int cmd_measures(const Scene& scene, const Options& opt) {
  Tolerances tols = parse_tols(opt);
  curvmeas::LiftStats stats;
  std::vector<BundlePoint> pts = labeled_bundle(scene, opt, tols, &stats);
  const int n = scene.dim();
  std::vector<int> ms;
  if (opt.m >= 0)
    ms.push_back(opt.m);
  else
    for (int m = 0; m <= n - 1; ++m) ms.push_back(m);

  std::vector<double> radii = opt.radii;
  if (radii.empty())
    for (double f : {0.3, 0.4, 0.5, 0.6, 0.7}) radii.push_back(opt.r * f);

  json out = json::array();
  std::optional<std::vector<MeasureEstimate>> steiner;
  try {
    steiner = curvmeas::steiner_fit(scene, radii, opt.grid_res * 2);
  } catch (const curvmeas::Error&) {
    steiner = std::nullopt;
  }
  curvmeas::StratifiedConfig stc;
  stc.density = opt.density;
  stc.strata.seed = opt.seed;
  for (int m : ms) {
    MeasureEstimate g =
        curvmeas::mu_global_on(pts, m, curvmeas::select_all, n, stats.dropped_area);
    MeasureEstimate s = curvmeas::mu_stratified(scene, m, curvmeas::select_all, stc, tols);
    std::vector<MeasureEstimate> ests = {g, s};
    if (steiner) ests.push_back((*steiner)[m]);
    for (const MeasureEstimate& e : ests) {
      json rec;
      rec["scene"] = opt.scene_path;
      rec["m"] = m;
      rec["method"] = e.method;
      rec["value"] = e.value;
      rec["stderr"] = e.stderr_;
      rec["uncaptured"] = e.uncaptured;
      rec["config_hash"] = config_hash("measures", opt);
      rec["seed"] = opt.seed;
      out.push_back(rec);
    }
  }
  emit(opt, out.dump(2) + "\n");
  return 0;
}

int cmd_steiner(const Scene& scene, const Options& opt) {
  std::vector<double> radii = opt.radii;
  if (radii.empty())
    for (double f : {0.3, 0.4, 0.5, 0.6, 0.7}) radii.push_back(opt.r * f);
  std::vector<MeasureEstimate> est = curvmeas::steiner_fit(scene, radii, opt.grid_res);
  json out;
  out["scene"] = opt.scene_path;
  out["radii"] = radii;
  out["grid_res"] = opt.grid_res;
  out["config_hash"] = config_hash("steiner", opt);
  out["seed"] = opt.seed;
  json arr = json::array();
  for (const MeasureEstimate& e : est) {
    json rec;
    rec["m"] = e.m;
    rec["method"] = e.method;
    rec["value"] = e.value;
    rec["stderr"] = e.stderr_;
    arr.push_back(rec);
  }
  out["estimates"] = arr;
  emit(opt, out.dump(2) + "\n");
  return 0;
}

int cmd_coarea(const Scene& scene, const Options& opt) {
  Tolerances tols = parse_tols(opt);
  int m = opt.m >= 0 ? opt.m : scene.dim() - 1;
  BundleConfig bc;
  bc.r = opt.r;
  bc.grid_res = opt.grid_res;
  bc.shells = opt.shells;
  bc.seed = opt.seed;
  curvmeas::StratifiedConfig stc;
  stc.density = opt.density;
  stc.strata.seed = opt.seed;
  curvmeas::CoareaResult res = curvmeas::coarea_check(
      scene, m, [](const Vec&, const Vec&) { return 1.0; }, bc, stc, tols);
  json out;
  out["scene"] = opt.scene_path;
  out["m"] = m;
  out["lhs"] = res.lhs;
  out["rhs"] = res.rhs;
  out["rel_gap"] = res.rel_gap;
  out["config_hash"] = config_hash("coarea", opt);
  out["seed"] = opt.seed;
  emit(opt, out.dump(2) + "\n");
  return res.rel_gap <= 0.02 ? 0 : kExitValidation;
}

int cmd_checks(const Scene& scene, const Options& opt) {
  curvmeas::ChecksConfig cc;
  cc.grid_res = opt.grid_res;
  cc.r = opt.r;
  cc.seed = opt.seed;
  cc.tols = parse_tols(opt);
  std::vector<curvmeas::CheckResult> results = curvmeas::run_checks(scene, cc);
  std::ostringstream txt;
  txt << "# curvmeas checks  scene=" << opt.scene_path << " seed=" << opt.seed
      << " grid_res=" << opt.grid_res << " r=" << fmt_double(opt.r)
      << " config=" << config_hash("checks", opt) << "\n";
  txt << curvmeas::format_checks(results);
  emit(opt, txt.str());
  for (const curvmeas::CheckResult& r : results)
    if (!r.pass) return kExitValidation;
  return 0;
}

// Piecewise-linear staircase approximation of the epigraph of the primitive
// of the Cantor function, clipped to a box: a qualitative demo of bundle
// mass over vanishing strata. No accuracy claims at finite depth.
int cmd_cantor(const Options& opt) {
  int depth = opt.depth;
  std::vector<std::pair<double, double>> intervals = {{0.0, 1.0}};
  for (int d = 0; d < depth; ++d) {
    std::vector<std::pair<double, double>> next;
    for (auto [a, b] : intervals) {
      double third = (b - a) / 3;
      next.emplace_back(a, a + third);
      next.emplace_back(b - third, b);
    }
    intervals = next;
  }
  // Cantor function value at the left/right edge of each retained interval:
  // f increases by 2^{-depth} across each of the 2^depth intervals.
  const int count = static_cast<int>(intervals.size());
  // vertices of g (primitive of f) sampled at interval endpoints
  std::vector<double> xs, gs;
  double g = 0, x_prev = 0, f_prev = 0;
  xs.push_back(0);
  gs.push_back(0);
  for (int i = 0; i < count; ++i) {
    auto [a, b] = intervals[i];
    double f_here = static_cast<double>(i) / count;       // plateau before a
    double f_after = static_cast<double>(i + 1) / count;  // plateau after b
    // g is linear on the gap [x_prev, a] with slope f_here
    g += f_prev * (a - x_prev);
    (void)f_here;
    xs.push_back(a);
    gs.push_back(g);
    // across [a, b] approximate f by its mean value
    double f_mid = 0.5 * (f_prev + f_after);
    g += f_mid * (b - a);
    xs.push_back(b);
    gs.push_back(g);
    x_prev = b;
    f_prev = f_after;
  }
  g += f_prev * (1.0 - x_prev);
  xs.push_back(1.0);
  gs.push_back(g);

  // epigraph {y >= chord(x)} clipped to a box, as unit-normal halfspaces
  json shapes = json::array();
  json hs = json::array();
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double dx = xs[i + 1] - xs[i];
    if (dx <= 1e-15) continue;
    double slope = (gs[i + 1] - gs[i]) / dx;
    double norm = std::hypot(slope, 1.0);
    // y >= g_i + slope (x - x_i)  <=>  (slope, -1).(x,y) <= slope x_i - g_i
    json h;
    h["n"] = {slope / norm, -1.0 / norm};
    h["b"] = (slope * xs[i] - gs[i]) / norm;
    hs.push_back(h);
  }
  {
    json h;
    h["n"] = {1.0, 0.0};
    h["b"] = 1.0;
    hs.push_back(h);
    json h2;
    h2["n"] = {-1.0, 0.0};
    h2["b"] = 0.0;
    hs.push_back(h2);
    json h3;
    h3["n"] = {0.0, 1.0};
    h3["b"] = gs.back() + 0.5;
    hs.push_back(h3);
  }
  json shape;
  shape["type"] = "convex_polytope";
  shape["halfspaces"] = hs;
  shapes.push_back(shape);
  json scene;
  scene["dim"] = 2;
  scene["shapes"] = shapes;
  scene["bbox_margin"] = 1.0;
  emit(opt, scene.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"curvature measures of closed sets from exact distance oracles"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&](CLI::App* cmd, bool need_scene = true) {
    if (need_scene)
      cmd->add_option("--scene", opt.scene_path, "scene JSON path")->required();
    cmd->add_option("--out", opt.out_path, "output path (default stdout)");
    cmd->add_option("--grid-res", opt.grid_res, "grid resolution per axis");
    cmd->add_option("--r", opt.r, "level-set radius");
    cmd->add_option("--radii", opt.radii, "radii for the Steiner fit")->delimiter(',');
    cmd->add_option("--m", opt.m, "measure/stratum index");
    cmd->add_option("--seed", opt.seed, "run seed");
    cmd->add_option("--shells", opt.shells, "dyadic shell count for the bundle");
    cmd->add_option("--density", opt.density, "stratified quadrature density");
    cmd->add_option("--tol", opt.tol_overrides, "tolerance override KEY=VALUE")
        ->take_all();
  };

  CLI::App* c_curv = app.add_subcommand("curvature", "per-(a,u) curvature table");
  add_common(c_curv);
  CLI::App* c_bundle = app.add_subcommand("bundle", "normal bundle sample CSV");
  add_common(c_bundle);
  CLI::App* c_meas = app.add_subcommand("measures", "three-way support measures");
  add_common(c_meas);
  CLI::App* c_st = app.add_subcommand("steiner", "Steiner polynomial fit");
  add_common(c_st);
  CLI::App* c_str = app.add_subcommand("strata", "stratum classification table");
  add_common(c_str);
  CLI::App* c_co = app.add_subcommand("coarea", "coarea identity check");
  add_common(c_co);
  CLI::App* c_ck = app.add_subcommand("checks", "full invariant suite");
  add_common(c_ck);
  CLI::App* c_ca = app.add_subcommand("cantor", "Cantor staircase demo scene");
  add_common(c_ca, false);
  c_ca->add_option("--depth", opt.depth, "staircase depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? kExitConfig : 0;
  }

  try {
    if (c_ca->parsed()) return cmd_cantor(opt);
    Scene scene = Scene::from_json_file(opt.scene_path);
    if (c_curv->parsed()) return cmd_curvature(scene, opt);
    if (c_bundle->parsed()) return cmd_bundle(scene, opt);
    if (c_meas->parsed()) return cmd_measures(scene, opt);
    if (c_st->parsed()) return cmd_steiner(scene, opt);
    if (c_str->parsed()) return cmd_strata(scene, opt);
    if (c_co->parsed()) return cmd_coarea(scene, opt);
    if (c_ck->parsed()) return cmd_checks(scene, opt);
  } catch (const curvmeas::SceneFormat& e) {
    std::cerr << "scene/config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const curvmeas::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
