#ifndef RG_CONTROLLER_HPP
#define RG_CONTROLLER_HPP

#include "rg/finger.hpp"
#include "rg/sensing.hpp"
#include "rg/world.hpp"

namespace rg {

enum class GraspPhase {
  APPROACH,
  CLOSING,
  EVALUATE,
  REGRASP_PINCH_PULL,
  REGRASP_ANTIPODAL,
  REGRASP_POWER_WRAP,
  TRANSPORT,
  SUCCEEDED,
  FAILED,
};

const char* phase_name(GraspPhase p);

struct ControlDecision {
  FingerCommand left;
  FingerCommand right;
  GraspPhase phase = GraspPhase::APPROACH;
  bool halt_base = false;
};

// Everything the sensing-based controllers may read, gripper frame.
struct SensorSnapshot {
  double time = 0.0;
  ProximityVector d;
  ContactReading contact_left;
  ContactReading contact_right;
  TipPose tip_left;
  TipPose tip_right;
  PlanarVec tip_vel_left;
  PlanarVec tip_vel_right;
  JointVec q_left{}, qd_left{};
  JointVec q_right{}, qd_right{};
  bool base_reached = false;
};

// The open-loop baseline sees joint state and the approach progress flag
// only; the type guarantees it cannot read range or touch data.
struct BaselineSnapshot {
  double time = 0.0;
  JointVec q_left{}, qd_left{};
  JointVec q_right{}, qd_right{};
  bool base_reached = false;
};

// Hand layout shared by the controllers and the scene builder.
struct HandGeometry {
  PlanarVec base_left{0.0, 0.07};
  PlanarVec base_right{0.0, -0.07};
  JointVec link_lengths = {0.06, 0.05, 0.04};
  JointVec q_open_left = {-0.85, 0.80, 0.95}; // spread pose; right is mirrored
  double tip_radius = 0.012;
  double palm_face_x = 0.015;
  double joint_limit = 2.2;
};

FingerState make_finger(const HandGeometry& geo, FingerSide side);

// Distal-link heading with the right side mirrored, so "wrapped past
// parallel" reads as a negative value on both fingers.
double signed_tip_heading(FingerSide side, double heading);

} // namespace rg

#endif
