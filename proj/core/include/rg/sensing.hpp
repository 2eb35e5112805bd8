#ifndef RG_SENSING_HPP
#define RG_SENSING_HPP

#include <array>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "rg/finger.hpp"
#include "rg/geometry.hpp"

namespace rg {

inline constexpr double kProximityMax = 0.20; // sensor range (m)
inline constexpr double kProximityMin = 1e-4; // reading floor when buried in contact (m)

// Seven range readings ordered left-out, left-forward, left-in, palm,
// right-in, right-forward, right-out. Unobstructed rays read range max.
struct ProximityVector {
  std::array<double, 7> d = {kProximityMax, kProximityMax, kProximityMax, kProximityMax,
                             kProximityMax, kProximityMax, kProximityMax};

  double l_out() const { return d[0]; }
  double l_forward() const { return d[1]; }
  double l_in() const { return d[2]; }
  double palm() const { return d[3]; }
  double r_in() const { return d[4]; }
  double r_forward() const { return d[5]; }
  double r_out() const { return d[6]; }
};

struct SensorRay {
  PlanarVec origin;
  PlanarVec dir; // unit
};

// Nearest non-negative ray parameter hitting the disk, or nullopt when the
// ray misses or the hit lies beyond d_max.
std::optional<double> raycast_disk(PlanarVec origin, PlanarVec dir, PlanarVec center,
                                   double radius, double d_max = kProximityMax);

// Ray placement for one fingertip: out / forward / in, origins on the tip
// surface. Rays and results are in whatever frame the finger is expressed in.
struct TipRays {
  SensorRay out;
  SensorRay forward;
  SensorRay in;
};

TipRays tip_rays(const FingerState& finger, double tip_radius);

SensorRay palm_ray(double palm_face_x);

// Min-composition over all disks for each of the seven rays.
ProximityVector sample_proximity(const FingerState& left, const FingerState& right,
                                 double tip_radius, double palm_face_x,
                                 std::span<const DiskObject> disks,
                                 double d_max = kProximityMax);

// One fingertip contact sample. With no contact, forces and bearing are 0.
struct ContactReading {
  bool in_contact = false;
  double f_normal = 0.0; // N, >= 0
  double f_shear = 0.0;  // N
  double bearing = 0.0;  // contact direction in the tip frame (rad)
};

struct ContactNoise {
  bool enabled = false;
  double sigma_force = 0.02; // N
  double sigma_bearing = 0.01; // rad
};

// Ground-truth tip contact state, produced by the contact resolver.
struct TipContact {
  bool active = false;
  int object_id = -1;
  double f_normal = 0.0;
  double f_shear = 0.0;
  double bearing = 0.0;
};

ContactReading sense_contact(const TipContact& truth, const ContactNoise& noise,
                             std::mt19937_64& rng);

} // namespace rg

#endif
