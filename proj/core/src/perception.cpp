#include "rg/perception.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rg {

bool occluded(const DiskObject& obj, std::span<const DiskObject> others,
              const CameraPose& camera) {
  const PlanarVec a = camera.origin;
  const PlanarVec b = obj.center;
  const PlanarVec ab = b - a;
  const double len2 = norm_sq(ab);
  for (const DiskObject& other : others) {
    if (other.id == obj.id) continue;
    const double s = len2 > 0.0 ? std::clamp(dot(other.center - a, ab) / len2, 0.0, 1.0) : 0.0;
    const PlanarVec closest = a + ab * s;
    if (norm(other.center - closest) < other.radius) return true;
  }
  return false;
}

SyntheticScan synth_scan(const DiskObject& obj, std::span<const DiskObject> others,
                         const CameraPose& camera, int n, double noise_sigma,
                         std::mt19937_64& rng) {
  if (n < 20) throw std::invalid_argument("synth_scan: need at least 20 points");
  const double dist = norm(camera.origin - obj.center);
  if (dist <= obj.radius)
    throw std::invalid_argument("synth_scan: camera inside the object");
  if (occluded(obj, others, camera))
    throw OccludedObject("object " + std::to_string(obj.id) + " is occluded");

  // Visible arc: the part of the rim facing the camera, bounded by the
  // tangent points.
  const double mid = std::atan2(camera.origin.y - obj.center.y, camera.origin.x - obj.center.x);
  const double half = std::acos(obj.radius / dist);

  SyntheticScan scan;
  scan.object_id = obj.id;
  scan.points.reserve(n);
  scan.depths.reserve(n);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  for (int k = 0; k < n; ++k) {
    const double theta = mid - half + (k + 0.5) * (2.0 * half / n);
    PlanarVec p = obj.center + unit_vec(theta) * obj.radius;
    if (noise_sigma > 0.0) {
      p.x += noise(rng);
      p.y += noise(rng);
    }
    scan.points.push_back(p);
    scan.depths.push_back(norm(p - camera.origin));
  }
  return scan;
}

PlanarVec extract_target(const SyntheticScan& scan) {
  const size_t n = scan.points.size();
  if (n < 10 || scan.depths.size() != n)
    throw InsufficientData("extract_target: need at least 10 scan points");

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (scan.depths[a] != scan.depths[b]) return scan.depths[a] < scan.depths[b];
    if (scan.points[a].x != scan.points[b].x) return scan.points[a].x < scan.points[b].x;
    return scan.points[a].y < scan.points[b].y;
  });

  const size_t trim = static_cast<size_t>(std::ceil(0.1 * static_cast<double>(n)));
  if (n <= 2 * trim) throw InsufficientData("extract_target: trim leaves no points");

  PlanarVec sum;
  size_t kept = 0;
  for (size_t i = trim; i < n - trim; ++i) {
    sum += scan.points[order[i]];
    ++kept;
  }
  return sum * (1.0 / static_cast<double>(kept));
}

} // namespace rg
