#include "rg/sensing.hpp"

#include <algorithm>
#include <cmath>

namespace rg {

std::optional<double> raycast_disk(PlanarVec origin, PlanarVec dir, PlanarVec center,
                                   double radius, double d_max) {
  const PlanarVec m = center - origin;
  const double b = dot(m, dir);
  const double c = norm_sq(m) - radius * radius;
  const double disc = b * b - c;
  if (disc < 0.0) return std::nullopt;
  const double s = std::sqrt(disc);
  double t = b - s;
  if (t < 0.0) t = b + s; // origin inside: take the exit point
  if (t < 0.0 || t > d_max) return std::nullopt;
  return t;
}

TipRays tip_rays(const FingerState& finger, double tip_radius) {
  const TipPose tp = forward_kinematics(finger);
  const PlanarVec fwd = unit_vec(tp.heading);
  // The outward face of the tip looks away from the grasp centerline.
  const double out_sign = finger.side == FingerSide::left ? 1.0 : -1.0;
  const PlanarVec out = rotated(fwd, out_sign * M_PI_2);
  TipRays rays;
  rays.out = {tp.pos + out * tip_radius, out};
  rays.forward = {tp.pos + fwd * tip_radius, fwd};
  rays.in = {tp.pos - out * tip_radius, -out};
  return rays;
}

SensorRay palm_ray(double palm_face_x) {
  return {{palm_face_x, 0.0}, {1.0, 0.0}};
}

namespace {

double ray_reading(const SensorRay& ray, std::span<const DiskObject> disks, double d_max) {
  double best = d_max;
  for (const DiskObject& obj : disks) {
    if (norm(obj.center - ray.origin) < obj.radius) {
      best = kProximityMin; // sensor buried in the object
      continue;
    }
    if (const auto t = raycast_disk(ray.origin, ray.dir, obj.center, obj.radius, d_max)) {
      best = std::min(best, std::max(*t, kProximityMin));
    }
  }
  return best;
}

} // namespace

ProximityVector sample_proximity(const FingerState& left, const FingerState& right,
                                 double tip_radius, double palm_face_x,
                                 std::span<const DiskObject> disks, double d_max) {
  const TipRays l = tip_rays(left, tip_radius);
  const TipRays r = tip_rays(right, tip_radius);
  const SensorRay palm = palm_ray(palm_face_x);
  ProximityVector pv;
  pv.d[0] = ray_reading(l.out, disks, d_max);
  pv.d[1] = ray_reading(l.forward, disks, d_max);
  pv.d[2] = ray_reading(l.in, disks, d_max);
  pv.d[3] = ray_reading(palm, disks, d_max);
  pv.d[4] = ray_reading(r.in, disks, d_max);
  pv.d[5] = ray_reading(r.forward, disks, d_max);
  pv.d[6] = ray_reading(r.out, disks, d_max);
  return pv;
}

ContactReading sense_contact(const TipContact& truth, const ContactNoise& noise,
                             std::mt19937_64& rng) {
  ContactReading r;
  if (!truth.active) return r;
  r.in_contact = true;
  r.f_normal = truth.f_normal;
  r.f_shear = truth.f_shear;
  r.bearing = truth.bearing;
  if (noise.enabled) {
    std::normal_distribution<double> nf(0.0, noise.sigma_force);
    std::normal_distribution<double> nb(0.0, noise.sigma_bearing);
    r.f_normal = std::max(0.0, r.f_normal + nf(rng));
    r.f_shear += nf(rng);
    r.bearing = wrap_angle(r.bearing + nb(rng));
  }
  return r;
}

} // namespace rg
