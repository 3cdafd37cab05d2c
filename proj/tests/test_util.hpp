#pragma once

#include <memory>
#include <vector>

#include "curvmeas/common.hpp"
#include "curvmeas/scene.hpp"

namespace test_scenes {

using curvmeas::make_vec;
using curvmeas::Scene;
using curvmeas::Vec;

inline Scene disc() {  // unit disc at the origin
  return Scene(2, {curvmeas::make_ball(make_vec({0, 0}), 1.0)}, 2.0);
}

inline Scene unit_square() {  // [0,1]^2
  return Scene(2, {curvmeas::make_axis_box(make_vec({0, 0}), make_vec({1, 1}))}, 2.0);
}

inline Scene segment2() {  // length 2 on the x-axis
  return Scene(2, {curvmeas::make_segment(make_vec({-1, 0}), make_vec({1, 0}))}, 2.0);
}

inline Scene point_origin() {
  return Scene(2, {curvmeas::make_point(make_vec({0, 0}))}, 2.0);
}

inline Scene two_points() {  // {(-1,0),(1,0)}
  return Scene(
      2, {curvmeas::make_point_cloud({make_vec({-1, 0}), make_vec({1, 0})})}, 2.0);
}

inline Scene ball_complement() {  // complement of the open unit ball
  return Scene(2, {curvmeas::make_ball_complement(make_vec({0, 0}), 1.0)}, 2.0);
}

inline Scene ball3(double R = 1.0) {
  return Scene(3, {curvmeas::make_ball(make_vec({0, 0, 0}), R)}, 2.0);
}

inline Scene box3() {  // unit cube
  return Scene(3, {curvmeas::make_axis_box(make_vec({0, 0, 0}), make_vec({1, 1, 1}))},
               2.0);
}

}  // namespace test_scenes
