#include <doctest.h>

#include <cmath>

#include "curvmeas/bundle.hpp"
#include "curvmeas/oracle.hpp"
#include "test_util.hpp"

using namespace curvmeas;
using test_scenes::make_vec;

namespace {
const Tolerances kT;

double total_patch(const std::vector<LevelSample>& samples) {
  double t = 0;
  for (const LevelSample& s : samples) t += s.patch_area;
  return t;
}

double total_weight(const std::vector<BundlePoint>& pts) {
  double t = 0;
  for (const BundlePoint& p : pts) t += p.weight;
  return t;
}
}  // namespace

TEST_SUITE_BEGIN("bundle");

TEST_CASE("level-set perimeters") {
  // disc at r = 0.5: circle of radius 1.5
  auto s1 = sample_level_set(test_scenes::disc(), 0.5, 512);
  CHECK(total_patch(s1) == doctest::Approx(2 * M_PI * 1.5).epsilon(0.005));

  // point at r = 1: unit circle
  auto s2 = sample_level_set(test_scenes::point_origin(), 1.0, 512);
  CHECK(total_patch(s2) == doctest::Approx(2 * M_PI).epsilon(0.005));

  // segment of length 2 at r = 0.5: stadium of perimeter 2L + 2 pi r
  auto s3 = sample_level_set(test_scenes::segment2(), 0.5, 512);
  CHECK(total_patch(s3) == doctest::Approx(4.0 + 2 * M_PI * 0.5).epsilon(0.01));
}

TEST_CASE("empty level set throws") {
  // the complement scene fills all space beyond delta = R
  CHECK_THROWS_AS(sample_level_set(test_scenes::ball_complement(), 1.5, 64),
                  EmptyLevelSet);
}

TEST_CASE("lift: disc bundle weight is 2 pi sqrt(2)") {
  auto level = sample_level_set(test_scenes::disc(), 0.5, 512);
  LiftStats stats;
  auto pts = lift_to_bundle(test_scenes::disc(), level, 0.5, kT, &stats);
  CHECK(total_weight(pts) ==
        doctest::Approx(analytic_reference("disc", "bundle_length").value)
            .epsilon(0.01));
  CHECK(stats.dropped == 0);
  // chi = 2/3 at every point, J = 2 sqrt(2) / 3
  for (std::size_t i = 0; i < pts.size(); i += 97) {
    CHECK(pts[i].chi[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
    CHECK(is_infinite(pts[i].reach));
  }
}

TEST_CASE("lift: point bundle weight is 2 pi") {
  auto scene = test_scenes::point_origin();
  auto level = sample_level_set(scene, 1.0, 512);
  auto pts = lift_to_bundle(scene, level, 1.0, kT, nullptr);
  CHECK(total_weight(pts) == doctest::Approx(2 * M_PI).epsilon(0.01));
  // J = 1 exactly: chi = 1/delta = 1
  for (std::size_t i = 0; i < pts.size(); i += 61)
    CHECK(pts[i].chi[0] == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("lift: square bundle weight is 4 + 2 pi") {
  auto scene = test_scenes::unit_square();
  auto level = sample_level_set(scene, 0.5, 512);
  LiftStats stats;
  auto pts = lift_to_bundle(scene, level, 0.5, kT, &stats);
  CHECK(total_weight(pts) ==
        doctest::Approx(analytic_reference("square", "bundle_length").value)
            .epsilon(0.01));
}

TEST_CASE("integrate_bundle with selectors") {
  auto scene = test_scenes::point_origin();
  auto level = sample_level_set(scene, 1.0, 512);
  auto pts = lift_to_bundle(scene, level, 1.0, kT, nullptr);
  MeasureEstimate all = integrate_bundle(pts, [](const BundlePoint&) { return 1.0; });
  CHECK(all.value == doctest::Approx(2 * M_PI).epsilon(0.01));
  MeasureEstimate upper = integrate_bundle(
      pts, [](const BundlePoint& p) { return p.u[1] >= 0 ? 1.0 : 0.0; });
  CHECK(upper.value == doctest::Approx(M_PI).epsilon(0.02));
  CHECK(all.stderr_ >= 0);
}

TEST_CASE("weight positivity and monotone coverage") {
  auto scene = test_scenes::unit_square();
  BundleConfig cfg;
  cfg.r = 0.5;
  cfg.grid_res = 128;
  auto pts = sample_bundle(scene, cfg, kT, nullptr);
  for (const BundlePoint& p : pts) CHECK(p.weight > 0);

  BundleConfig cfg2 = cfg;
  cfg2.r = 0.25;
  auto finer = sample_bundle(scene, cfg2, kT, nullptr);
  const double cell = 5.0 / cfg.grid_res;
  int missed = 0;
  for (std::size_t i = 0; i < pts.size(); i += 7) {
    double best = kInfinity;
    for (const BundlePoint& q : finer)
      best = std::min(best, (pts[i].a - q.a).norm() + 0.25 * (pts[i].u - q.u).norm());
    if (best > 2.5 * cell) ++missed;
  }
  CHECK(missed == 0);
}

TEST_CASE("grid refinement changes the total by < 1%") {
  auto scene = test_scenes::disc();
  BundleConfig c1;
  c1.r = 0.5;
  c1.grid_res = 128;
  BundleConfig c2 = c1;
  c2.grid_res = 256;
  double t1 = total_weight(sample_bundle(scene, c1, kT, nullptr));
  double t2 = total_weight(sample_bundle(scene, c2, kT, nullptr));
  CHECK(std::abs(t1 - t2) / t2 < 0.01);
}

TEST_CASE("shell decomposition captures short-reach directions") {
  // two nearby points: facing directions have reach 1, outward infinite
  auto scene = test_scenes::two_points();
  BundleConfig cfg;
  cfg.r = 1.6;  // coarse level misses the facing caps entirely
  cfg.grid_res = 384;
  cfg.shells = 4;
  auto pts = sample_bundle(scene, cfg, kT, nullptr);
  // N(A) = two full unit circles of directions
  CHECK(total_weight(pts) == doctest::Approx(4 * M_PI).epsilon(0.03));
  // single-level sampling at the same r undercounts
  BundleConfig flat = cfg;
  flat.shells = 1;
  auto single = sample_bundle(scene, flat, kT, nullptr);
  CHECK(total_weight(single) < 0.9 * total_weight(pts));
}

TEST_CASE("3d: solid ball bundle area is 8 pi") {
  auto scene = test_scenes::ball3(1.0);
  auto level = sample_level_set(scene, 0.5, 64);
  // sphere of radius 1.5
  CHECK(total_patch(level) == doctest::Approx(4 * M_PI * 1.5 * 1.5).epsilon(0.01));
  auto pts = lift_to_bundle(scene, level, 0.5, kT, nullptr);
  CHECK(total_weight(pts) ==
        doctest::Approx(analytic_reference("ball3", "bundle_length").value)
            .epsilon(0.02));
}

TEST_SUITE_END();
