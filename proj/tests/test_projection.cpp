#include <doctest.h>

#include "curvmeas/oracle.hpp"
#include "curvmeas/projection.hpp"
#include "curvmeas/rng.hpp"
#include "test_util.hpp"

using namespace curvmeas;
using test_scenes::make_vec;

namespace {
const Tolerances kT;
}

TEST_SUITE_BEGIN("projection");

TEST_CASE("psi closed forms") {
  auto p = psi(test_scenes::disc(), make_vec({2, 0}), 1e-9);
  REQUIRE(p.has_value());
  CHECK((p->a - make_vec({1, 0})).norm() < 1e-12);
  CHECK((p->u - make_vec({1, 0})).norm() < 1e-12);
  CHECK(p->delta == doctest::Approx(1.0));

  p = psi(test_scenes::point_origin(), make_vec({0, 0.7}), 1e-9);
  REQUIRE(p.has_value());
  CHECK((p->u - make_vec({0, 1})).norm() < 1e-12);
  CHECK(p->delta == doctest::Approx(0.7));

  p = psi(test_scenes::ball_complement(), make_vec({0.5, 0}), 1e-9);
  REQUIRE(p.has_value());
  CHECK((p->a - make_vec({1, 0})).norm() < 1e-12);
  CHECK((p->u - make_vec({-1, 0})).norm() < 1e-12);
  CHECK(p->delta == doctest::Approx(0.5));

  // a + delta u = x
  CHECK((p->a + p->delta * p->u - make_vec({0.5, 0})).norm() < 1e-10);
}

TEST_CASE("rho: convex scenes are infinite") {
  CHECK(is_infinite(rho(test_scenes::disc(), make_vec({2, 0}), 1e6, 1e-9)));
  CHECK(is_infinite(rho(test_scenes::unit_square(), make_vec({3, 3}), 1e6, 1e-9)));
}

TEST_CASE("rho against the dense-scan oracle") {
  // ball complement: ray from (1,0) toward the center, rho = R/delta = 2
  auto bc = test_scenes::ball_complement();
  double r = rho(bc, make_vec({0.5, 0}), 1e6, 1e-9);
  CHECK(r == doctest::Approx(2.0).epsilon(1e-6));
  double scan = dense_scan_reach(bc, make_vec({1, 0}), make_vec({-1, 0}), 8.0, 20000);
  CHECK(r == doctest::Approx(scan / 0.5).epsilon(1e-4));

  // two points: the midpoint bisector cuts the ray at t = 2
  auto two = test_scenes::two_points();
  r = rho(two, make_vec({-0.5, 0}), 1e6, 1e-9);
  CHECK(r == doctest::Approx(2.0).epsilon(1e-6));
  scan = dense_scan_reach(two, make_vec({-1, 0}), make_vec({1, 0}), 8.0, 20000);
  CHECK(r == doctest::Approx(scan / 0.5).epsilon(1e-4));
}

TEST_CASE("reach_function closed forms") {
  CHECK(is_infinite(
      reach_function(test_scenes::disc(), make_vec({1, 0}), make_vec({1, 0}), 1e6, 1e-9)));
  double r = reach_function(test_scenes::ball_complement(), make_vec({1, 0}),
                            make_vec({-1, 0}), 1e6, 1e-9);
  CHECK(r == doctest::Approx(1.0).epsilon(1e-6));
  // tangent direction is not in the bundle
  CHECK(reach_function(test_scenes::disc(), make_vec({1, 0}), make_vec({0, 1}), 1e6,
                       1e-9) == 0.0);
  CHECK_THROWS_AS(
      reach_function(test_scenes::disc(), make_vec({5, 5}), make_vec({1, 0}), 1e6, 1e-9),
      NotOnSet);
}

TEST_CASE("dilate") {
  auto d = dilate(test_scenes::disc(), make_vec({2, 0}), 0.5, 1e-9);
  CHECK((d.point - make_vec({1.5, 0})).norm() < 1e-12);
  CHECK(!d.beyond_rho);

  d = dilate(test_scenes::point_origin(), make_vec({0, 2}), 2.0, 1e-9);
  CHECK((d.point - make_vec({0, 4})).norm() < 1e-12);

  // identity at t = 1
  d = dilate(test_scenes::unit_square(), make_vec({2, 2}), 1.0, 1e-9);
  CHECK((d.point - make_vec({2, 2})).norm() < 1e-12);

  // beyond rho flagged on the complement scene
  d = dilate(test_scenes::ball_complement(), make_vec({0.5, 0}), 2.5, 1e-9);
  CHECK(d.beyond_rho);
}

TEST_CASE("is_regular") {
  CHECK(is_regular(test_scenes::disc(), make_vec({2, 0}), kT).regular);
  CHECK(!is_regular(test_scenes::two_points(), make_vec({0, 1}), kT).regular);

  // single nearest point with rho > 1: brute-force nearest scan confirms
  Vec x = make_vec({-0.5, 0.4});
  auto two = test_scenes::two_points();
  double d1 = (x - make_vec({-1, 0})).norm();
  double d2 = (x - make_vec({1, 0})).norm();
  CHECK(d1 < d2);  // unique nearest point
  CHECK(is_regular(two, x, kT).regular);

  // points on the medial axis are rejected
  CHECK(!is_regular(two, make_vec({0, 0.5}), kT).regular);
}

TEST_CASE("xi constant along rays and rho dilation identity") {
  auto bc = test_scenes::ball_complement();
  std::uint64_t h = 99;
  int used = 0;
  for (int k = 0; k < 200 && used < 40; ++k) {
    Vec x(2);
    x[0] = -0.9 + 1.8 * hash_unit(h = splitmix64(h));
    x[1] = -0.9 + 1.8 * hash_unit(h = splitmix64(h));
    if (x.norm() > 0.9 || x.norm() < 0.1) continue;
    auto reg = is_regular(bc, x, kT);
    if (!reg.regular) continue;
    ++used;
    double rx = reg.rho;
    for (double t : {0.5, 0.9 * rx}) {
      if (t <= 0 || t >= rx) continue;
      DilateResult dr = dilate(bc, x, t, 1e-9);
      auto q = psi(bc, dr.point, 1e-9);
      REQUIRE(q.has_value());
      CHECK((q->a - reg.p.a).norm() <= 1e-9);
      double rt = rho(bc, dr.point, 1e6, 1e-9);
      CHECK(rt * t == doctest::Approx(rx).epsilon(1e-6));
    }
    // reach_function(a,u) = delta * rho(x)
    double reach = reach_function(bc, reg.p.a, reg.p.u, 1e6, 1e-9);
    CHECK(reach == doctest::Approx(reg.p.delta * rx).epsilon(1e-6));
  }
  CHECK(used >= 20);
}

TEST_CASE("Lipschitz bound for xi on A_lambda") {
  auto two = test_scenes::two_points();
  std::uint64_t h = 13;
  std::vector<std::pair<Vec, double>> pts;  // (x, rho)
  for (int k = 0; k < 300 && pts.size() < 30; ++k) {
    Vec x(2);
    x[0] = -2 + 4 * hash_unit(h = splitmix64(h));
    x[1] = -2 + 4 * hash_unit(h = splitmix64(h));
    if (two.delta(x) < 0.05) continue;
    auto reg = is_regular(two, x, kT);
    if (!reg.regular) continue;
    pts.emplace_back(x, reg.rho);
  }
  REQUIRE(pts.size() >= 10);
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double lam = std::min(pts[i].second, pts[j].second);
      double bound = is_infinite(lam) ? 1.0 : lam / (lam - 1.0);
      Vec ai = *two.xi(pts[i].first, 1e-9);
      Vec aj = *two.xi(pts[j].first, 1e-9);
      CHECK((ai - aj).norm() <=
            bound * (pts[i].first - pts[j].first).norm() * (1 + 1e-6) + 1e-12);
    }
}

TEST_SUITE_END();
