#ifndef RG_WORLD_HPP
#define RG_WORLD_HPP

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "rg/finger.hpp"
#include "rg/geometry.hpp"
#include "rg/sensing.hpp"

namespace rg {

struct SimulationDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SimParams {
  double dt = 1.0 / 1200.0; // fixed physics timestep (s)

  double tip_radius = 0.012; // fingertip sphere (m)
  double k_contact = 2000.0; // contact spring (N/m)
  double b_contact = 20.0;   // contact damping (N*s/m)
  double mu = 0.6;           // tip/object friction

  double ground_decel = 0.5; // sliding friction deceleration (m/s^2)
  double v_max = 2.0;        // object speed cap (m/s)

  double approach_speed = 0.15;  // m/s
  double transport_speed = 0.2;  // m/s
  double base_accel = 3.0;       // base velocity ramp (m/s^2)

  double joint_limit = 2.2;     // rad, symmetric
  double stop_stiffness = 10.0; // N*m/rad beyond the limit
  double stop_damping = 0.05;
  JointVec joint_inertia = {5e-4, 3e-4, 2e-4}; // kg*m^2
  double joint_viscous = 0.005;                // N*m*s/rad
  double qd_max = 25.0;                        // rad/s safety clamp

  double palm_radius = 0.015;    // palm pad capsule radius; face plane x = palm_radius
  double palm_half_width = 0.06; // capsule half length (m)

  int ctrl_every = 4;  // controller tick period in physics steps (300 Hz)
  int sense_every = 6; // sensor refresh period in physics steps (200 Hz)
};

struct ObjectState {
  DiskObject disk;
  PlanarVec vel;
};

// Tip/object contact pair, all geometry in the gripper frame.
struct TipObjectContact {
  FingerSide side = FingerSide::left;
  int object_id = -1;
  PlanarVec point;   // on the tip surface
  PlanarVec normal;  // from the object center toward the tip center
  double penetration = 0.0;
  double f_normal = 0.0;  // >= 0
  double f_tangent = 0.0; // signed along perp(normal); |f_t| <= mu * f_n
  double bearing = 0.0;   // contact direction in the tip frame (rad)
};

struct ContactSet {
  std::vector<TipObjectContact> pairs;
  TipContact left;  // strongest contact per tip, for the touch sensors
  TipContact right;
};

struct WorldState {
  SimParams params;
  double time = 0.0;
  long step_count = 0;

  GripperFrame base;
  PlanarVec base_vel;        // world frame
  PlanarVec base_vel_target; // world frame; ramped at base_accel

  FingerState left;
  FingerState right;
  JointGains gains;

  std::vector<ObjectState> objects;

  std::mt19937_64 rng{0};

  // While transporting, only the held object interacts with the hand and
  // other objects are ignored (stand-in for lifting off the surface).
  bool transport_mode = false;
  int held_object_id = -1;

  ObjectState* find_object(int id);
  const ObjectState* find_object(int id) const;
};

// Current tip/object contacts with spring-damper forces. Pure: does not
// advance the world.
ContactSet resolve_contacts(const WorldState& w);

// Advances one fixed timestep under the given joint torques.
// dt must equal w.params.dt; NaN torques or states raise SimulationDiverged.
void step(WorldState& w, const JointVec& tau_left, const JointVec& tau_right, double dt);

enum class TransportVerdict { HELD, DROPPED };

struct TransportReport {
  TransportVerdict verdict = TransportVerdict::DROPPED;
  double duration = 0.0;
  double distance = 0.0;      // base path length actually traveled
  double drop_distance = 0.0; // where the grasp was lost, if it was
};

// Moves the base along a straight line to place_base_target while the finger
// hold commands keep the grip. HELD iff both tip contacts on the held object
// stay above gamma_f and the object stays within 2 cm of its initial
// gripper-frame position for the whole traverse.
struct FingerCommand {
  JointVec q_des{};
  JointVec qd_des{};
  JointVec tau_ff{};
  double kp_scale = 1.0;
};

TransportReport transport_check(WorldState& w, const FingerCommand& hold_left,
                                const FingerCommand& hold_right, PlanarVec place_base_target,
                                double gamma_f);

} // namespace rg

#endif
