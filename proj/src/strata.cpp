#include "curvmeas/strata.hpp"

#include <algorithm>
#include <cmath>

#include "curvmeas/parallel.hpp"
#include "curvmeas/rng.hpp"

namespace curvmeas {

namespace {

int default_dirs(int dim) { return dim == 2 ? 256 : 2048; }

// Angular gap of the probe grid; the acceptance window must cover it so a
// normal direction falling between grid directions is still captured.
double grid_gap(int dim, int n_dirs) {
  return dim == 2 ? M_PI / n_dirs : 1.2 * std::sqrt(4 * M_PI / n_dirs);
}

}  // namespace

StratumLabel classify_stratum(const Scene& scene, const Vec& a,
                              const StrataConfig& cfg) {
  if (scene.delta(a) > cfg.tol)
    throw NotOnSet("classify_stratum: point not on A");

  const int n = scene.dim();
  const double s = cfg.s_probe > 0 ? cfg.s_probe : 1e-3 * scene.diameter();
  const int n_dirs = cfg.n_dirs > 0 ? cfg.n_dirs : default_dirs(n);

  // delta(a + s u) = s cos(angle to the fan); a direction within `gap` of the
  // fan keeps the deficit below s (1 - cos gap).
  const double gap = 1.5 * grid_gap(n, n_dirs);
  const double accept = std::max(cfg.tol, s * (1.0 - std::cos(gap)));

  std::vector<Vec> dirs = unit_directions(n, n_dirs, cfg.seed);
  std::vector<Vec> captured;
  for (const Vec& u : dirs)
    if (scene.delta(a + s * u) >= s - accept) captured.push_back(u);

  StratumLabel lab;
  lab.a = a;
  if (captured.empty()) {
    lab.dis_dim = 0;  // interior point: Dis(A,a) = {0}
    lab.m = n;
    lab.confidence = 1.0;
    return lab;
  }

  // rank of the direction matrix = dim of the linear span of the fan
  Mat d(static_cast<int>(captured.size()), n);
  for (std::size_t i = 0; i < captured.size(); ++i)
    d.row(static_cast<int>(i)) = captured[i].transpose();
  Eigen::JacobiSVD<Mat> svd(d);
  const Vec& sv = svd.singularValues();
  double cutoff = cfg.rank_rel * sv[0];
  int rank = 0;
  while (rank < sv.size() && sv[rank] >= cutoff) ++rank;

  lab.dis_dim = rank;
  lab.m = n - rank;
  if (rank < sv.size() && sv[0] > 0) {
    lab.confidence = std::clamp(1.0 - sv[rank] / cutoff, 0.0, 1.0);
  } else {
    lab.confidence = 1.0;
  }
  return lab;
}

void label_strata(const Scene& scene, std::vector<BundlePoint>& points,
                  const StrataConfig& cfg, double cell) {
  // Exact feature points of lower strata; bases nearby resolve downward.
  // Feature nodes are densified past the grid cell so distance-to-node
  // stands in for distance-to-feature.
  int density = 8;
  if (cell > 0)
    density = std::clamp(static_cast<int>(scene.diameter() / cell), 8, 1024);
  std::vector<std::pair<Vec, int>> features;  // (location, stratum m)
  for (int m = 0; m < scene.dim() - 1; ++m)
    for (const StratumSample& s : scene.stratum_samples(m, density))
      features.emplace_back(s.z, m);

  parallel_for(points.size(), [&](std::size_t i) {
    StrataConfig local = cfg;
    local.seed = hash_combine(cfg.seed, i);
    StratumLabel lab = classify_stratum(scene, points[i].a, local);
    int m = lab.m;
    bool forced = false;
    if (cell > 0) {
      for (const auto& [z, fm] : features)
        if (fm < m && (points[i].a - z).norm() <= 2 * cell) {
          m = fm;
          forced = true;
        }
    }
    points[i].stratum = m;
    points[i].stratum_forced = forced;
  });
}

std::vector<BundlePoint> restrict_bundle(const std::vector<BundlePoint>& points,
                                         int m, const Scene& scene,
                                         const StrataConfig& cfg, double cell) {
  std::vector<BundlePoint> labeled = points;
  bool need = false;
  for (const BundlePoint& p : labeled)
    if (p.stratum < 0) {
      need = true;
      break;
    }
  if (need) label_strata(scene, labeled, cfg, cell);
  std::vector<BundlePoint> out;
  for (const BundlePoint& p : labeled)
    if (p.stratum == m) out.push_back(p);
  return out;
}

}  // namespace curvmeas
