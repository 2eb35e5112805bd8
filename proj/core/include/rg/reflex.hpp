#ifndef RG_REFLEX_HPP
#define RG_REFLEX_HPP

#include <optional>
#include <vector>

#include "rg/config.hpp"
#include "rg/controller.hpp"

namespace rg {

// Grasp trigger flags. near/far come from the palm range, tips from the
// distal link headings, occlude from the forward rays.
struct TriggerFlags {
  bool near = false;
  bool far = false;
  bool tips = false;
  bool occlude = false;

  bool any() const { return near || (far && tips) || occlude; }
};

TriggerFlags evaluate_triggers(const ProximityVector& d, double q_l_tip, double q_r_tip,
                               const ReflexConfig& cfg);

// Per-fingertip repulsive/attractive field force in the gripper frame.
// out and forward are repulsive below their thresholds; in holds the
// set-point d_des_in, which is what produces contour following.
PlanarVec potential_field_force(FingerSide side, const ProximityVector& d, double tip_heading,
                                const ReflexConfig& cfg);

struct ObjectEstimate {
  PlanarVec center; // gripper frame
  double radius = 0.0;
};

// Least-squares disk fit from the two tip contacts: minimizes
// sum_i |(c - p_i) - r n_i|^2 over center c and radius r, where p_i is the
// contact point and n_i the unit normal pointing from the tip into the
// object. Returns nullopt unless both tips are in contact and the normals
// are independent enough to pin the fit down.
std::optional<ObjectEstimate> estimate_object(const ContactReading& left, const TipPose& tip_left,
                                              const ContactReading& right,
                                              const TipPose& tip_right, double tip_radius);

enum class RegraspBranch { NONE, PINCH_PULL, ANTIPODAL, POWER_WRAP };

const char* branch_name(RegraspBranch b);

// Picks the recovery maneuver from the estimate and the tip x positions:
// object beyond both tips -> PINCH_PULL; behind both tips and small ->
// ANTIPODAL; everything else (mixed, equal, large, or no estimate) ->
// POWER_WRAP.
RegraspBranch select_regrasp_branch(const std::optional<ObjectEstimate>& est, double x_l_tip,
                                    double x_r_tip, const ReflexConfig& cfg);

enum class WaypointMode { MOVE, SQUEEZE, PULL };

struct Waypoint {
  PlanarVec left;  // tip center target, gripper frame
  PlanarVec right;
  WaypointMode mode = WaypointMode::MOVE;
};

struct RegraspPlan {
  RegraspBranch branch = RegraspBranch::NONE;
  std::vector<Waypoint> waypoints;
};

RegraspPlan plan_regrasp(const std::optional<ObjectEstimate>& est, PlanarVec tip_l,
                         PlanarVec tip_r, const ReflexConfig& cfg, const HandGeometry& geo,
                         double d_palm = kProximityMax);

// Grasp verification: both tips slow, both grip forces above gamma_f, and
// the palm range confirms something is actually in the hand.
bool evaluate_success(const ContactReading& left, const ContactReading& right, double v_l,
                      double v_r, double d_palm, const ReflexConfig& cfg);

// True when the two contact normals oppose each other within gamma_a.
bool normals_antipodal(const ContactReading& left, const TipPose& tip_left,
                       const ContactReading& right, const TipPose& tip_right, double gamma_a);

struct ReflexOptions {
  bool regrasp_enabled = true;       // false gives the partial controller
  bool antipodal_check = true;       // require gamma_a on pinch-type attempts
  int max_regrasps = 4;              // recovery attempts before giving up
  double approach_kp_scale = 0.02;   // soft posture hold while the field is live
  double grip_force = 3.0;           // squeeze force per tip (N)
  double tip_speed = 0.25;           // waypoint tracking speed cap (m/s)
  double expected_diameter = 0.065;  // task prior, same one the pick command gets
};

// Reactive grasping state machine. Tick it at the control rate; it returns
// joint commands plus the phase so the harness can hand off to
// transport_check when the grasp verifies.
class ReflexController {
 public:
  ReflexController(const ReflexConfig& cfg, const ReflexOptions& opts, const HandGeometry& geo,
                   double dt_ctrl);

  ControlDecision tick(const SensorSnapshot& s);

  // Harness feedback after transport_check resolves the attempt.
  void notify_transport(bool held, double now);

  GraspPhase phase() const { return phase_; }
  int regrasp_count() const { return regrasp_count_; }
  double grasp_start_time() const { return grasp_start_; }
  RegraspBranch last_branch() const { return last_branch_; }
  bool branch_seen(RegraspBranch b) const;

  // Tip x of the spread pose; the harness uses it to stop the base with the
  // grasp point on the commanded target.
  double approach_tip_x() const;

 private:
  ControlDecision approach_tick(const SensorSnapshot& s);
  ControlDecision tracking_tick(const SensorSnapshot& s);
  ControlDecision evaluate_tick(const SensorSnapshot& s);
  ControlDecision hold_tick() const;
  void enter(GraspPhase p, double now);
  void start_plan(const RegraspPlan& plan, const SensorSnapshot& s, double now);
  void integrate_toward(const Waypoint& wp, const SensorSnapshot& s);
  bool waypoint_done(const Waypoint& wp, const SensorSnapshot& s, double now) const;

  ReflexConfig cfg_;
  ReflexOptions opts_;
  HandGeometry geo_;
  double dt_;

  GraspPhase phase_ = GraspPhase::APPROACH;
  double phase_entry_ = 0.0;
  double grasp_start_ = 0.0;
  bool grasp_started_ = false;

  JointVec q_des_left_{};
  JointVec q_des_right_{};
  JointVec qd_des_left_{};
  JointVec qd_des_right_{};

  std::vector<Waypoint> plan_;
  size_t wp_index_ = 0;
  double wp_entry_ = 0.0;
  RegraspBranch last_branch_ = RegraspBranch::NONE;
  unsigned branches_seen_ = 0;
  int regrasp_count_ = 0;
};

} // namespace rg

#endif
