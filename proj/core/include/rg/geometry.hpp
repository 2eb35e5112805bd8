#ifndef RG_GEOMETRY_HPP
#define RG_GEOMETRY_HPP

#include <cmath>
#include <string>

namespace rg {

struct PlanarVec {
  double x = 0.0;
  double y = 0.0;

  PlanarVec operator+(PlanarVec o) const { return {x + o.x, y + o.y}; }
  PlanarVec operator-(PlanarVec o) const { return {x - o.x, y - o.y}; }
  PlanarVec operator*(double s) const { return {x * s, y * s}; }
  PlanarVec operator-() const { return {-x, -y}; }
  PlanarVec& operator+=(PlanarVec o) { x += o.x; y += o.y; return *this; }
  PlanarVec& operator-=(PlanarVec o) { x -= o.x; y -= o.y; return *this; }
};

inline PlanarVec operator*(double s, PlanarVec v) { return v * s; }

inline double dot(PlanarVec a, PlanarVec b) { return a.x * b.x + a.y * b.y; }
inline double cross(PlanarVec a, PlanarVec b) { return a.x * b.y - a.y * b.x; }
inline double norm(PlanarVec v) { return std::hypot(v.x, v.y); }
inline double norm_sq(PlanarVec v) { return v.x * v.x + v.y * v.y; }

// 90 degree counter-clockwise rotation.
inline PlanarVec perp(PlanarVec v) { return {-v.y, v.x}; }

inline PlanarVec rotated(PlanarVec v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x - s * v.y, s * v.x + c * v.y};
}

inline PlanarVec unit_vec(double angle) { return {std::cos(angle), std::sin(angle)}; }

inline PlanarVec normalized(PlanarVec v) {
  const double n = norm(v);
  if (n < 1e-12) return {0.0, 0.0};
  return {v.x / n, v.y / n};
}

// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);
  if (r <= -M_PI) r += 2.0 * M_PI;
  return r;
}

// Planar pose of the gripper base. +x is the approach direction,
// +y points toward the left finger.
struct GripperFrame {
  PlanarVec origin;
  double heading = 0.0;

  PlanarVec world_to_gripper(PlanarVec p) const {
    return rotated(p - origin, -heading);
  }
  PlanarVec gripper_to_world(PlanarVec p) const {
    return origin + rotated(p, heading);
  }
  PlanarVec world_to_gripper_vec(PlanarVec v) const { return rotated(v, -heading); }
  PlanarVec gripper_to_world_vec(PlanarVec v) const { return rotated(v, heading); }
};

struct DiskObject {
  int id = 0;
  PlanarVec center;
  double radius = 0.0;
  double mass = 0.2;
  std::string label;
};

} // namespace rg

#endif
