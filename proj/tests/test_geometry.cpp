#include "doctest.h"
#include "rg/geometry.hpp"

#include <cmath>

using namespace rg;

TEST_CASE("vector algebra basics") {
  PlanarVec a{3.0, 4.0};
  PlanarVec b{-1.0, 2.0};
  CHECK(norm(a) == doctest::Approx(5.0));
  CHECK(dot(a, b) == doctest::Approx(5.0));
  CHECK(cross(a, b) == doctest::Approx(10.0));
  PlanarVec s = a + 2.0 * b;
  CHECK(s.x == doctest::Approx(1.0));
  CHECK(s.y == doctest::Approx(8.0));
}

TEST_CASE("perp rotates by +90 degrees") {
  PlanarVec e{1.0, 0.0};
  PlanarVec p = perp(e);
  CHECK(p.x == doctest::Approx(0.0));
  CHECK(p.y == doctest::Approx(1.0));
  // applying it four times is the identity
  PlanarVec q = perp(perp(perp(perp(e))));
  CHECK(q.x == doctest::Approx(1.0));
  CHECK(q.y == doctest::Approx(0.0));
}

TEST_CASE("rotated matches angle addition") {
  PlanarVec v = unit_vec(0.3);
  PlanarVec w = rotated(v, 0.5);
  CHECK(w.x == doctest::Approx(std::cos(0.8)));
  CHECK(w.y == doctest::Approx(std::sin(0.8)));
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(0.0) == doctest::Approx(0.0));
  CHECK(wrap_angle(4.0 * M_PI + 0.1) == doctest::Approx(0.1));
  CHECK(wrap_angle(-4.0 * M_PI - 0.1) == doctest::Approx(-0.1));
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
  CHECK(wrap_angle(-M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("gripper frame round trip") {
  GripperFrame f{PlanarVec{0.2, -0.1}, 0.7};
  PlanarVec p{0.05, 0.03};
  PlanarVec w = f.gripper_to_world(p);
  PlanarVec back = f.world_to_gripper(w);
  CHECK(back.x == doctest::Approx(p.x).epsilon(1e-12));
  CHECK(back.y == doctest::Approx(p.y).epsilon(1e-12));

  // vectors ignore the origin
  PlanarVec v{1.0, 0.0};
  PlanarVec wv = f.gripper_to_world_vec(v);
  CHECK(wv.x == doctest::Approx(std::cos(0.7)));
  CHECK(wv.y == doctest::Approx(std::sin(0.7)));
}
