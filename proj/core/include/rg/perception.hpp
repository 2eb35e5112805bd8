#ifndef RG_PERCEPTION_HPP
#define RG_PERCEPTION_HPP

#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "rg/geometry.hpp"

namespace rg {

struct OccludedObject : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientData : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CameraPose {
  PlanarVec origin;
};

// Noisy samples of the camera-facing arc of one disk, with measured depth
// (camera distance) per point.
struct SyntheticScan {
  int object_id = -1;
  std::vector<PlanarVec> points;
  std::vector<double> depths;
};

// n >= 20 points uniform in angle over the visible arc, each displaced by
// isotropic Gaussian noise. Throws OccludedObject when the line of sight to
// the object center crosses another disk.
SyntheticScan synth_scan(const DiskObject& obj, std::span<const DiskObject> others,
                         const CameraPose& camera, int n, double noise_sigma,
                         std::mt19937_64& rng);

// Depth-trimmed centroid: drops ceil(0.1 n) points from each end of the
// depth ordering and averages the rest. Order-independent; needs >= 10
// points. The result keeps the toward-camera arc bias of the scan.
PlanarVec extract_target(const SyntheticScan& scan);

// True when the segment from the camera to the object center crosses any
// other disk.
bool occluded(const DiskObject& obj, std::span<const DiskObject> others,
              const CameraPose& camera);

} // namespace rg

#endif
