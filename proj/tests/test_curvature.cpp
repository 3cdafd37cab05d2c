#include <doctest.h>

#include "curvmeas/curvature.hpp"
#include "curvmeas/oracle.hpp"
#include "test_util.hpp"

using namespace curvmeas;
using test_scenes::make_vec;

namespace {
const Tolerances kT;
}

TEST_SUITE_BEGIN("curvature");

TEST_CASE("kappa_from_chi") {
  // disc of radius R seen at distance r: chi = 1/(R+r) transforms to 1/R
  CHECK(kappa_from_chi(1.0 / 1.5, 0.5, 1e-6) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(kappa_from_chi(0.0, 0.5, 1e-6) == 0.0);
  CHECK(is_infinite(kappa_from_chi(2.0, 0.5, 1e-6)));      // chi = 1/r exactly
  CHECK(is_infinite(kappa_from_chi(2.0 + 1e-9, 0.5, 1e-6)));
}

TEST_CASE("curvature_at on the disc") {
  CurvatureData c =
      curvature_at(test_scenes::disc(), make_vec({1, 0}), make_vec({1, 0}), 0.5, kT);
  CHECK(c.m == 1);
  REQUIRE(c.kappa.size() == 1);
  CHECK(c.kappa[0] == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(c.Q(0, 0) == doctest::Approx(1.0).epsilon(1e-4));
  CHECK(is_infinite(c.reach));
  // tube-formula oracle: kappa of the unit circle
  CHECK(analytic_reference("disc", "principal_curvature_1").value ==
        doctest::Approx(c.kappa[0]).epsilon(1e-4));
  // T_A is perpendicular to u
  CHECK(std::abs(c.T_basis.col(0).dot(c.u)) < 1e-8);
}

TEST_CASE("curvature_at on a flat face") {
  Scene box = test_scenes::unit_square();
  CurvatureData c = curvature_at(box, make_vec({0.5, 1.0}), make_vec({0, 1}), 0.5, kT);
  CHECK(c.m == 1);
  CHECK(std::abs(c.kappa[0]) < 1e-6);
}

TEST_CASE("curvature_at on the concave boundary") {
  CurvatureData c = curvature_at(test_scenes::ball_complement(), make_vec({1, 0}),
                                 make_vec({-1, 0}), 0.25, kT);
  REQUIRE(c.kappa.size() == 1);
  CHECK(c.kappa[0] == doctest::Approx(-1.0).epsilon(1e-4));
  // Q(tau,tau) >= -|tau|^2 / reach with reach = 1
  CHECK(c.reach == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(c.Q(0, 0) >= -1.0 / c.reach - 1e-4);
}

TEST_CASE("corner point has T_A = {0} and kappa = inf") {
  CurvatureData c = curvature_at(test_scenes::unit_square(), make_vec({1, 1}),
                                 Vec(make_vec({1, 1}) / std::sqrt(2.0)), 0.3, kT);
  CHECK(c.m == 0);
  REQUIRE(c.kappa.size() == 1);
  CHECK(is_infinite(c.kappa[0]));
}

TEST_CASE("NotInBundle when reach <= r_eval") {
  CHECK_THROWS_AS(curvature_at(test_scenes::ball_complement(), make_vec({1, 0}),
                               make_vec({-1, 0}), 1.5, kT),
                  NotInBundle);
}

TEST_CASE("symmetric_function") {
  CHECK(symmetric_function({0.0}, 0) == doctest::Approx(1.0));
  CHECK(symmetric_function({0.0}, 1) == doctest::Approx(0.0));
  CHECK(symmetric_function({1.0}, 1) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(symmetric_function({kInfinity}, 1) == doctest::Approx(1.0));
  CHECK(symmetric_function({kInfinity}, 0) == doctest::Approx(0.0));
  // dim 3: two finite entries, fully finite product
  CHECK(symmetric_function({1.0, 2.0}, 2) ==
        doctest::Approx(2.0 / std::sqrt(10.0)));
  CHECK(symmetric_function({1.0, 2.0}, 1) ==
        doctest::Approx(3.0 / std::sqrt(10.0)));
  // one infinite entry among two
  CHECK(symmetric_function({1.0, kInfinity}, 1) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(symmetric_function({1.0, kInfinity}, 2) ==
        doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS_AS(symmetric_function({1.0}, 5), InvalidIndex);
}

TEST_CASE("r-independence of kappa across evaluation radii") {
  // convex and concave scenes, three radii scaled to the reach
  {
    auto disc = test_scenes::disc();
    double ref = -1;
    for (double r : {0.2, 0.5, 0.9}) {
      CurvatureData c = curvature_at(disc, make_vec({1, 0}), make_vec({1, 0}), r, kT);
      if (ref < 0) ref = c.kappa[0];
      CHECK(c.kappa[0] == doctest::Approx(ref).epsilon(1e-3));
      CHECK(c.m == 1);
    }
  }
  {
    auto bc = test_scenes::ball_complement();
    for (double r : {0.2 * 1.0, 0.5 * 1.0, 0.9 * 1.0}) {
      CurvatureData c = curvature_at(bc, make_vec({1, 0}), make_vec({-1, 0}),
                                     0.999 * r, kT);
      CHECK(c.kappa[0] == doctest::Approx(-1.0).epsilon(1e-3));
    }
  }
}

TEST_CASE("compare_with_smooth: sphere") {
  SmoothSurface s = SmoothSurface::sphere(make_vec({0, 0, 0}), 2.0);
  Vec a = make_vec({2, 0, 0}), u = make_vec({1, 0, 0});
  SmoothCompareResult res = compare_with_smooth(s, a, u, 0.5, kT);
  REQUIRE(res.kappa.size() == 2);
  CHECK(res.kappa[0] == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(res.kappa[1] == doctest::Approx(0.5).epsilon(2e-3));
  CHECK(res.q_residual < 1e-3);
  CHECK(res.tangent_angle < 1e-3);
}

TEST_CASE("compare_with_smooth: torus outer equator") {
  SmoothSurface s = SmoothSurface::torus(2.0, 0.5);
  Vec a = make_vec({2.5, 0, 0}), u = make_vec({1, 0, 0});
  SmoothCompareResult res = compare_with_smooth(s, a, u, 0.2, kT);
  REQUIRE(res.kappa.size() == 2);
  CHECK(res.kappa[0] == doctest::Approx(0.4).epsilon(1e-2));
  CHECK(res.kappa[1] == doctest::Approx(2.0).epsilon(1e-2));
  CHECK(res.q_residual < 1e-2);
}

TEST_CASE("compare_with_smooth: circle seen from inside (sign convention)") {
  SmoothSurface s = SmoothSurface::circle(make_vec({0, 0}), 1.0);
  Vec a = make_vec({1, 0}), u = make_vec({-1, 0});
  SmoothCompareResult res = compare_with_smooth(s, a, u, 0.3, kT);
  REQUIRE(res.kappa.size() == 1);
  CHECK(res.kappa[0] == doctest::Approx(-1.0).epsilon(1e-3));
  CHECK(res.q_residual < 1e-3);
}

TEST_CASE("compare_with_smooth: ellipse") {
  SmoothSurface s = SmoothSurface::ellipse(2.0, 1.0);
  // curvature a/b^2 = 2 at (2,0); b/a^2 = 0.25 at (0,1)
  SmoothCompareResult res =
      compare_with_smooth(s, make_vec({2, 0}), make_vec({1, 0}), 0.2, kT);
  CHECK(res.kappa[0] == doctest::Approx(2.0).epsilon(5e-3));
  CHECK(res.q_residual < 5e-3);
  res = compare_with_smooth(s, make_vec({0, 1}), make_vec({0, 1}), 0.2, kT);
  CHECK(res.kappa[0] == doctest::Approx(0.25).epsilon(5e-3));

  CHECK_THROWS_AS(
      compare_with_smooth(s, make_vec({1.5, 0}), make_vec({1, 0}), 0.2, kT),
      NotOnManifold);
}

TEST_SUITE_END();
