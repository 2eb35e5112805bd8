#ifndef RG_FINGER_HPP
#define RG_FINGER_HPP

#include <array>
#include <optional>

#include "rg/geometry.hpp"

namespace rg {

inline constexpr int kJointsPerFinger = 3;

using JointVec = std::array<double, kJointsPerFinger>;

enum class FingerSide { left, right };

// Per-joint PD gains plus the actuator torque limit.
struct JointGains {
  JointVec kp = {2.0, 1.5, 1.0}; // N*m/rad
  JointVec kd = {0.02, 0.02, 0.02}; // N*m*s/rad
  double tau_max = 1.5; // N*m
};

// One three-link planar finger, expressed in the gripper frame.
struct FingerState {
  FingerSide side = FingerSide::left;
  PlanarVec base_offset; // joint 1 position in the gripper frame
  double mount_heading = 0.0; // first link heading when q = 0
  JointVec link_lengths = {0.06, 0.05, 0.04};
  JointVec q = {0.0, 0.0, 0.0};
  JointVec qd = {0.0, 0.0, 0.0};
};

struct TipPose {
  PlanarVec pos; // fingertip sphere center, gripper frame
  double heading = 0.0; // distal link direction, gripper frame
};

// 2x3 fingertip position Jacobian, gripper frame. jac[r][c] = d(tip_r)/d(q_c).
using TipJacobian = std::array<std::array<double, kJointsPerFinger>, 2>;

// Positions of the three joints plus the tip, gripper frame (4 points).
std::array<PlanarVec, kJointsPerFinger + 1> joint_positions(const FingerState& f);

TipPose forward_kinematics(const FingerState& f);

TipJacobian tip_jacobian(const FingerState& f);

// Tip velocity in the gripper frame (base motion excluded).
PlanarVec tip_velocity(const FingerState& f);

// PD with feedforward, clamped to +-gains.tau_max per joint.
JointVec pd_torque(const JointVec& q_des, const JointVec& qd_des, const JointVec& q,
                   const JointVec& qd, const JointVec& tau_ff, const JointGains& gains,
                   double kp_scale = 1.0);

// Maps a force applied at the fingertip (gripper frame) to joint torques.
JointVec tip_force_to_torques(const FingerState& f, PlanarVec force);

// Damped least squares joint rates realizing a tip velocity, with a weak
// null-space pull toward q_ref to keep the chain away from fold-overs.
JointVec resolved_rate(const FingerState& f, const JointVec& q_from, PlanarVec tip_vel,
                       const JointVec& q_ref, double null_gain = 2.0);

// Newton solve for a tip position + distal heading. Returns nullopt when the
// target is out of reach or the iteration fails to converge.
std::optional<JointVec> solve_tip_ik(const FingerState& f, PlanarVec tip_target,
                                     double heading_target, const JointVec& q_init);

} // namespace rg

#endif
