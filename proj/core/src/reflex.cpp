#include "rg/reflex.hpp"

#include <algorithm>
#include <cmath>

namespace rg {

const char* phase_name(GraspPhase p) {
  switch (p) {
    case GraspPhase::APPROACH: return "APPROACH";
    case GraspPhase::CLOSING: return "CLOSING";
    case GraspPhase::EVALUATE: return "EVALUATE";
    case GraspPhase::REGRASP_PINCH_PULL: return "REGRASP_PINCH_PULL";
    case GraspPhase::REGRASP_ANTIPODAL: return "REGRASP_ANTIPODAL";
    case GraspPhase::REGRASP_POWER_WRAP: return "REGRASP_POWER_WRAP";
    case GraspPhase::TRANSPORT: return "TRANSPORT";
    case GraspPhase::SUCCEEDED: return "SUCCEEDED";
    case GraspPhase::FAILED: return "FAILED";
  }
  return "?";
}

const char* branch_name(RegraspBranch b) {
  switch (b) {
    case RegraspBranch::NONE: return "NONE";
    case RegraspBranch::PINCH_PULL: return "PINCH_PULL";
    case RegraspBranch::ANTIPODAL: return "ANTIPODAL";
    case RegraspBranch::POWER_WRAP: return "POWER_WRAP";
  }
  return "?";
}

FingerState make_finger(const HandGeometry& geo, FingerSide side) {
  FingerState f;
  f.side = side;
  f.link_lengths = geo.link_lengths;
  f.mount_heading = 0.0;
  if (side == FingerSide::left) {
    f.base_offset = geo.base_left;
    f.q = geo.q_open_left;
  } else {
    f.base_offset = geo.base_right;
    for (int i = 0; i < kJointsPerFinger; ++i) f.q[i] = -geo.q_open_left[i];
  }
  return f;
}

double signed_tip_heading(FingerSide side, double heading) {
  return side == FingerSide::left ? heading : -heading;
}

TriggerFlags evaluate_triggers(const ProximityVector& d, double q_l_tip, double q_r_tip,
                               const ReflexConfig& cfg) {
  TriggerFlags t;
  t.near = d.palm() < cfg.d_near;
  t.far = d.palm() < cfg.d_far;
  t.tips = q_l_tip < cfg.theta_close && q_r_tip < cfg.theta_close;
  t.occlude = d.l_forward() < cfg.d_occlude || d.r_forward() < cfg.d_occlude;
  return t;
}

PlanarVec potential_field_force(FingerSide side, const ProximityVector& d, double tip_heading,
                                const ReflexConfig& cfg) {
  double d_out, d_fwd, d_in;
  if (side == FingerSide::left) {
    d_out = d.l_out();
    d_fwd = d.l_forward();
    d_in = d.l_in();
  } else {
    d_out = d.r_out();
    d_fwd = d.r_forward();
    d_in = d.r_in();
  }
  const PlanarVec e_fwd = unit_vec(tip_heading);
  const double out_sign = side == FingerSide::left ? 1.0 : -1.0;
  const PlanarVec e_out = rotated(e_fwd, out_sign * M_PI_2);
  const PlanarVec e_in = -e_out;

  PlanarVec f;
  if (d_out < cfg.d_thresh_out) f += e_out * (cfg.k_out * (d_out - cfg.d_thresh_out));
  if (d_fwd < cfg.d_thresh_forward) f += e_fwd * (cfg.k_forward * (d_fwd - cfg.d_thresh_forward));
  if (d_in < cfg.d_thresh_in) f += e_in * (cfg.k_in * (d_in - cfg.d_des_in));
  return f;
}

std::optional<ObjectEstimate> estimate_object(const ContactReading& left, const TipPose& tip_left,
                                              const ContactReading& right,
                                              const TipPose& tip_right, double tip_radius) {
  if (!left.in_contact || !right.in_contact) return std::nullopt;

  PlanarVec p[2], n[2];
  const ContactReading* readings[2] = {&left, &right};
  const TipPose* tips[2] = {&tip_left, &tip_right};
  for (int i = 0; i < 2; ++i) {
    const PlanarVec u = unit_vec(tips[i]->heading + readings[i]->bearing);
    p[i] = tips[i]->pos + u * tip_radius;
    n[i] = u;
  }

  // Normal equations for [cx cy r]: rows are c - r n_i = p_i.
  double ata[3][3] = {};
  double atb[3] = {};
  for (int i = 0; i < 2; ++i) {
    ata[0][0] += 1.0;
    ata[1][1] += 1.0;
    ata[0][2] += -n[i].x;
    ata[1][2] += -n[i].y;
    ata[2][0] += -n[i].x;
    ata[2][1] += -n[i].y;
    ata[2][2] += norm_sq(n[i]);
    atb[0] += p[i].x;
    atb[1] += p[i].y;
    atb[2] += -dot(n[i], p[i]);
  }

  // 3x3 solve, partial pivoting.
  double m[3][4] = {
      {ata[0][0], ata[0][1], ata[0][2], atb[0]},
      {ata[1][0], ata[1][1], ata[1][2], atb[1]},
      {ata[2][0], ata[2][1], ata[2][2], atb[2]},
  };
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
    if (std::fabs(m[piv][col]) < 1e-9) return std::nullopt;
    if (piv != col) std::swap(m[piv], m[col]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double k = m[r][col] / m[col][col];
      for (int c = col; c < 4; ++c) m[r][c] -= k * m[col][c];
    }
  }
  ObjectEstimate est;
  est.center = {m[0][3] / m[0][0], m[1][3] / m[1][1]};
  est.radius = m[2][3] / m[2][2];
  if (!(est.radius > 0.002 && est.radius < 0.25)) return std::nullopt;
  return est;
}

RegraspBranch select_regrasp_branch(const std::optional<ObjectEstimate>& est, double x_l_tip,
                                    double x_r_tip, const ReflexConfig& cfg) {
  if (!est) return RegraspBranch::POWER_WRAP;
  const double x = est->center.x;
  // Half a tip radius of slop: an equator pinch that verified too far from
  // the palm reads as "center at the tips", and pulling it home is right.
  if (x > std::max(x_l_tip, x_r_tip) - 0.006) return RegraspBranch::PINCH_PULL;
  if (x < x_l_tip && x < x_r_tip && est->radius < cfg.r_power) return RegraspBranch::ANTIPODAL;
  return RegraspBranch::POWER_WRAP;
}

namespace {

// Keeps a tip target inside the finger workspace by shortening its x reach.
PlanarVec clamp_reachable(PlanarVec target, PlanarVec base, double max_reach) {
  const double dy = target.y - base.y;
  const double span = max_reach * max_reach - dy * dy;
  if (span <= 1e-6) return {base.x + 0.02, target.y};
  const double x_hi = base.x + std::sqrt(span);
  return {std::min(target.x, x_hi), target.y};
}

// A squeeze stops on the contact circle well short of its nominal y, so its
// reach clamp has to use the y where the tip actually ends up; clamping at
// the nominal y drags the pinch ahead of the equator.
PlanarVec clamp_squeeze(PlanarVec target, double y_contact, PlanarVec base, double max_reach) {
  const PlanarVec at = clamp_reachable({target.x, y_contact}, base, max_reach);
  return {at.x, target.y};
}

} // namespace

RegraspPlan plan_regrasp(const std::optional<ObjectEstimate>& est, PlanarVec tip_l,
                         PlanarVec tip_r, const ReflexConfig& cfg, const HandGeometry& geo,
                         double d_palm) {
  RegraspPlan plan;
  plan.branch = select_regrasp_branch(est, tip_l.x, tip_r.x, cfg);

  const double reach_cap = geo.link_lengths[0] + geo.link_lengths[1] + geo.link_lengths[2] - 0.005;
  auto add = [&](double xl, double yl, double xr, double yr, WaypointMode mode) {
    Waypoint wp;
    wp.left = clamp_reachable({xl, yl}, geo.base_left, reach_cap);
    wp.right = clamp_reachable({xr, yr}, geo.base_right, reach_cap);
    wp.mode = mode;
    plan.waypoints.push_back(wp);
  };
  // Same staging rule as the first close: swing out at the tips' own x
  // before running the lane, because a single diagonal move drags a tip
  // that ended up on the object's flank straight through it.
  auto stage_out = [&](double y_lane) {
    if (std::fabs(tip_l.y) < y_lane - 0.002 || std::fabs(tip_r.y) < y_lane - 0.002)
      add(tip_l.x, y_lane, tip_r.x, -y_lane, WaypointMode::MOVE);
  };
  // Squeeze targets aim at the centerline; the grip-force freeze is what
  // actually stops them, and a shallow target could never build force.
  const double sq_y = 0.004;
  auto add_squeeze = [&](double x, double y_contact) {
    Waypoint wp;
    wp.left = clamp_squeeze({x, sq_y}, y_contact, geo.base_left, reach_cap);
    wp.right = clamp_squeeze({x, -sq_y}, -y_contact, geo.base_right, reach_cap);
    wp.mode = WaypointMode::SQUEEZE;
    plan.waypoints.push_back(wp);
  };

  if (plan.branch == RegraspBranch::PINCH_PULL) {
    const double open_y = est->radius + geo.tip_radius + 0.012;
    const double touch_y = est->radius + geo.tip_radius;
    // Bite just past the equator; a pinch ahead of it leaks the object
    // forward and loses it, one behind it only nudges it toward the palm.
    // Keep the bite small: the nudge grows with the angle it creates.
    const double x_at = est->center.x + 0.0015;
    const double x_home = cfg.d_des_in;
    stage_out(open_y);
    add(x_at, open_y, x_at, -open_y, WaypointMode::MOVE);
    add_squeeze(x_at, touch_y);
    add(x_home, sq_y, x_home, -sq_y, WaypointMode::PULL);
    // Reopen and re-pinch at the equator so the final grasp is antipodal
    // even when the drag skewed the contact geometry.
    add(x_home, open_y, x_home, -open_y, WaypointMode::MOVE);
    add_squeeze(x_home, touch_y);
  } else if (plan.branch == RegraspBranch::ANTIPODAL) {
    const double open_y = est->radius + geo.tip_radius + 0.012;
    const double touch_y = est->radius + geo.tip_radius;
    const double x_at = est->center.x + 0.0015;
    stage_out(open_y);
    add(x_at, open_y, x_at, -open_y, WaypointMode::MOVE);
    add_squeeze(x_at, touch_y);
  } else {
    // Power wrap: slide past the object, curl in behind its equator, drag it
    // onto the palm, then squeeze from behind.
    double reach, y_pass, y_in;
    if (est) {
      reach = est->center.x + est->radius + geo.tip_radius + 0.005;
      y_pass = est->radius + geo.tip_radius + 0.012;
      // Half a radius of spread: tips parked on the centerline behind the
      // object give no sideways containment, and the wrap sheds its load
      // the first time the base turns.
      y_in = std::max(0.008, 0.5 * est->radius);
    } else if (d_palm < kProximityMax) {
      // No contact estimate, but the palm range still brackets the center
      // for any plausible radius; reach past it so the curl lands behind.
      const double center_guess = geo.palm_face_x + d_palm + 0.03;
      reach = center_guess + 0.03 + geo.tip_radius;
      y_pass = 0.075;
      y_in = 0.012;
    } else {
      reach = std::max(tip_l.x, tip_r.x) + 0.05;
      y_pass = 0.075;
      y_in = 0.012;
    }
    const double x_home = geo.palm_face_x + 0.02;
    stage_out(y_pass);
    add(reach, y_pass, reach, -y_pass, WaypointMode::MOVE);
    add(reach, y_in, reach, -y_in, WaypointMode::MOVE);
    add(x_home, y_in, x_home, -y_in, WaypointMode::PULL);
    add(x_home, sq_y, x_home, -sq_y, WaypointMode::SQUEEZE);
  }
  return plan;
}

bool evaluate_success(const ContactReading& left, const ContactReading& right, double v_l,
                      double v_r, double d_palm, const ReflexConfig& cfg) {
  return v_l < cfg.gamma_v && v_r < cfg.gamma_v && std::fabs(left.f_normal) > cfg.gamma_f &&
         std::fabs(right.f_normal) > cfg.gamma_f && d_palm < cfg.d_far;
}

bool normals_antipodal(const ContactReading& left, const TipPose& tip_left,
                       const ContactReading& right, const TipPose& tip_right, double gamma_a) {
  if (!left.in_contact || !right.in_contact) return false;
  const PlanarVec nl = unit_vec(tip_left.heading + left.bearing);
  const PlanarVec nr = unit_vec(tip_right.heading + right.bearing);
  const double c = std::clamp(dot(nl, -nr), -1.0, 1.0);
  return std::acos(c) <= gamma_a;
}

ReflexController::ReflexController(const ReflexConfig& cfg, const ReflexOptions& opts,
                                   const HandGeometry& geo, double dt_ctrl)
    : cfg_(cfg), opts_(opts), geo_(geo), dt_(dt_ctrl) {
  q_des_left_ = make_finger(geo, FingerSide::left).q;
  q_des_right_ = make_finger(geo, FingerSide::right).q;
}

double ReflexController::approach_tip_x() const {
  return forward_kinematics(make_finger(geo_, FingerSide::left)).pos.x;
}

bool ReflexController::branch_seen(RegraspBranch b) const {
  return branches_seen_ & (1u << static_cast<unsigned>(b));
}

void ReflexController::enter(GraspPhase p, double now) {
  phase_ = p;
  phase_entry_ = now;
}

ControlDecision ReflexController::hold_tick() const {
  ControlDecision d;
  d.left.q_des = q_des_left_;
  d.right.q_des = q_des_right_;
  d.phase = phase_;
  d.halt_base = true;
  return d;
}

ControlDecision ReflexController::tick(const SensorSnapshot& s) {
  const bool attempt_phase =
      phase_ == GraspPhase::CLOSING || phase_ == GraspPhase::REGRASP_PINCH_PULL ||
      phase_ == GraspPhase::REGRASP_ANTIPODAL || phase_ == GraspPhase::REGRASP_POWER_WRAP;
  if (attempt_phase && s.time - grasp_start_ > cfg_.t_fail + 1e-9) {
    // Attempt over budget: declare it failed and let the evaluator route
    // to the next regrasp (or give up once the retry budget is spent).
    enter(GraspPhase::EVALUATE, s.time);
  }

  switch (phase_) {
    case GraspPhase::APPROACH:
      return approach_tick(s);
    case GraspPhase::CLOSING:
    case GraspPhase::REGRASP_PINCH_PULL:
    case GraspPhase::REGRASP_ANTIPODAL:
    case GraspPhase::REGRASP_POWER_WRAP:
      return tracking_tick(s);
    case GraspPhase::EVALUATE:
      return evaluate_tick(s);
    case GraspPhase::TRANSPORT:
    case GraspPhase::SUCCEEDED:
    case GraspPhase::FAILED:
      return hold_tick();
  }
  return hold_tick();
}

void ReflexController::notify_transport(bool held, double now) {
  if (phase_ == GraspPhase::TRANSPORT) {
    enter(held ? GraspPhase::SUCCEEDED : GraspPhase::FAILED, now);
  }
}

ControlDecision ReflexController::approach_tick(const SensorSnapshot& s) {
  ControlDecision d;
  d.phase = phase_;
  d.halt_base = false;

  d.left.q_des = make_finger(geo_, FingerSide::left).q;
  d.right.q_des = make_finger(geo_, FingerSide::right).q;
  d.left.kp_scale = opts_.approach_kp_scale;
  d.right.kp_scale = opts_.approach_kp_scale;

  FingerState fl = make_finger(geo_, FingerSide::left);
  fl.q = s.q_left;
  FingerState fr = make_finger(geo_, FingerSide::right);
  fr.q = s.q_right;
  const PlanarVec force_l = potential_field_force(FingerSide::left, s.d, s.tip_left.heading, cfg_);
  const PlanarVec force_r =
      potential_field_force(FingerSide::right, s.d, s.tip_right.heading, cfg_);
  d.left.tau_ff = tip_force_to_torques(fl, force_l);
  d.right.tau_ff = tip_force_to_torques(fr, force_r);

  const TriggerFlags trig =
      evaluate_triggers(s.d, signed_tip_heading(FingerSide::left, s.tip_left.heading),
                        signed_tip_heading(FingerSide::right, s.tip_right.heading), cfg_);
  if (trig.any() || s.base_reached) {
    grasp_start_ = s.time;
    grasp_started_ = true;
    q_des_left_ = s.q_left;
    q_des_right_ = s.q_right;
    qd_des_left_ = {};
    qd_des_right_ = {};
    plan_.clear();
    const double reach_cap =
        geo_.link_lengths[0] + geo_.link_lengths[1] + geo_.link_lengths[2] - 0.005;
    const double touch_y = 0.5 * opts_.expected_diameter + geo_.tip_radius;
    double x_close = std::max(s.tip_left.pos.x, s.tip_right.pos.x);
    if (s.d.palm() < kProximityMax) {
      // The palm ray reads the front surface directly, so pinch at the
      // expected equator plus a small bite (ahead of the equator the pinch
      // leaks the object forward; the bite stays small because a deep one
      // shoves it toward the palm instead). Pinching at the tips' own x
      // would either squirt the object forward when it sits further out
      // or land so deep behind the equator that the grip reads skewed.
      x_close = geo_.palm_face_x + s.d.palm() + 0.5 * opts_.expected_diameter + 0.0015;
    }
    const double x_tip_max = std::max(s.tip_left.pos.x, s.tip_right.pos.x);
    if (x_close > x_tip_max + 0.005) {
      // Reaching past the tips: swing out at each tip's own x first, then
      // run the lane forward. A single diagonal move drags a tip that the
      // approach curled onto the front flank across the face, bulldozing
      // the object out of reach. The lane sits at touch_y + r because the
      // palm ray only sees objects within one radius of the centerline,
      // so it clears anything the palm could have seen.
      const double y_pass = std::max({std::fabs(s.tip_left.pos.y), std::fabs(s.tip_right.pos.y),
                                      touch_y + 0.5 * opts_.expected_diameter + 0.008});
      Waypoint out;
      out.left = clamp_reachable({s.tip_left.pos.x, y_pass}, geo_.base_left, reach_cap);
      out.right = clamp_reachable({s.tip_right.pos.x, -y_pass}, geo_.base_right, reach_cap);
      out.mode = WaypointMode::MOVE;
      plan_.push_back(out);
      Waypoint fwd;
      fwd.left = clamp_reachable({x_close, y_pass}, geo_.base_left, reach_cap);
      fwd.right = clamp_reachable({x_close, -y_pass}, geo_.base_right, reach_cap);
      fwd.mode = WaypointMode::MOVE;
      plan_.push_back(fwd);
    } else if (std::fabs(x_close - s.tip_left.pos.x) > 0.005 ||
               std::fabs(x_close - s.tip_right.pos.x) > 0.005) {
      // Pinch line behind the tips: align with it open before converging,
      // or the squeeze touches down behind the equator at a skewed angle.
      Waypoint align;
      const double y_stage = std::max({std::fabs(s.tip_left.pos.y), std::fabs(s.tip_right.pos.y),
                                       touch_y + 0.008});
      align.left = clamp_reachable({x_close, y_stage}, geo_.base_left, reach_cap);
      align.right = clamp_reachable({x_close, -y_stage}, geo_.base_right, reach_cap);
      align.mode = WaypointMode::MOVE;
      plan_.push_back(align);
    }
    Waypoint close;
    close.left = clamp_squeeze({x_close, 0.004}, touch_y, geo_.base_left, reach_cap);
    close.right = clamp_squeeze({x_close, -0.004}, -touch_y, geo_.base_right, reach_cap);
    close.mode = WaypointMode::SQUEEZE;
    plan_.push_back(close);
    wp_index_ = 0;
    wp_entry_ = s.time;
    last_branch_ = RegraspBranch::NONE;
    enter(GraspPhase::CLOSING, s.time);
  }
  return d;
}

void ReflexController::start_plan(const RegraspPlan& plan, const SensorSnapshot& s, double now) {
  plan_ = plan.waypoints;
  wp_index_ = 0;
  wp_entry_ = now;
  last_branch_ = plan.branch;
  branches_seen_ |= 1u << static_cast<unsigned>(plan.branch);
  ++regrasp_count_;
  grasp_start_ = now; // the failure clock covers one attempt at a time
  q_des_left_ = s.q_left;
  q_des_right_ = s.q_right;
  qd_des_left_ = {};
  qd_des_right_ = {};
  switch (plan.branch) {
    case RegraspBranch::PINCH_PULL: enter(GraspPhase::REGRASP_PINCH_PULL, now); break;
    case RegraspBranch::ANTIPODAL: enter(GraspPhase::REGRASP_ANTIPODAL, now); break;
    default: enter(GraspPhase::REGRASP_POWER_WRAP, now); break;
  }
}

void ReflexController::integrate_toward(const Waypoint& wp, const SensorSnapshot& s) {
  struct Side {
    FingerSide side;
    PlanarVec target;
    const JointVec* q_actual;
    const ContactReading* contact;
    JointVec* q_des;
    JointVec* qd_des;
  };
  Side sides[2] = {
      {FingerSide::left, wp.left, &s.q_left, &s.contact_left, &q_des_left_, &qd_des_left_},
      {FingerSide::right, wp.right, &s.q_right, &s.contact_right, &q_des_right_, &qd_des_right_},
  };
  for (Side& sd : sides) {
    FingerState probe = make_finger(geo_, sd.side);
    probe.q = *sd.q_des;
    const TipPose tp = forward_kinematics(probe);

    PlanarVec v;
    const double inward = sd.side == FingerSide::left ? -1.0 : 1.0;
    if (wp.mode == WaypointMode::PULL) {
      const double ex = sd.target.x - tp.pos.x;
      v.x = std::clamp(4.0 * ex, -opts_.tip_speed, opts_.tip_speed);
      // A heavy object lags the drag, the contact slides ahead of its
      // equator, and the pinch leaks forward. Pause the drag while grip
      // is weak and let the inward press rebuild it first.
      const double f_min = std::min(s.contact_left.f_normal, s.contact_right.f_normal);
      if (f_min < 0.33 * opts_.grip_force) v.x = 0.0;
      // Keep pressing while dragging.
      if (sd.contact->f_normal < 0.8 * opts_.grip_force) v.y = inward * 0.05;
    } else if (wp.mode == WaypointMode::SQUEEZE) {
      // Axes decoupled on purpose: with a proportional vector drive the x
      // error only resolves as fast as the (much larger) y error, so the
      // tips touch down behind the pinch line and the grip reads skewed.
      // x gets the hotter gain and the right of way: a tip that descends
      // while still off the line lands off the equator, and the skewed
      // press shoves the object across the floor during the force ramp.
      v.x = std::clamp(12.0 * (sd.target.x - tp.pos.x), -opts_.tip_speed, opts_.tip_speed);
      v.y = std::clamp(4.0 * (sd.target.y - tp.pos.y), -opts_.tip_speed, opts_.tip_speed);
      if (!sd.contact->in_contact && std::fabs(sd.target.x - tp.pos.x) > 0.002) v.y = 0.0;
      if (sd.contact->f_normal >= opts_.grip_force) {
        v = {0.0, 0.0}; // force target met; hold the setpoint
      }
    } else {
      const PlanarVec err = sd.target - tp.pos;
      const double dist = norm(err);
      if (dist > 1e-6) v = err * (std::min(opts_.tip_speed, 4.0 * dist) / dist);
    }

    const JointVec q_ref = make_finger(geo_, sd.side).q;
    const JointVec qd = resolved_rate(probe, *sd.q_des, v, q_ref, 1.5);
    for (int i = 0; i < kJointsPerFinger; ++i) {
      double q = (*sd.q_des)[i] + qd[i] * dt_;
      q = std::clamp(q, (*sd.q_actual)[i] - 0.35, (*sd.q_actual)[i] + 0.35);
      q = std::clamp(q, -geo_.joint_limit, geo_.joint_limit);
      (*sd.q_des)[i] = q;
      (*sd.qd_des)[i] = qd[i];
    }
  }
}

bool ReflexController::waypoint_done(const Waypoint& wp, const SensorSnapshot& s,
                                     double now) const {
  const double in_wp = now - wp_entry_;
  FingerState pl = make_finger(geo_, FingerSide::left);
  pl.q = q_des_left_;
  FingerState pr = make_finger(geo_, FingerSide::right);
  pr.q = q_des_right_;
  const PlanarVec tl = forward_kinematics(pl).pos;
  const PlanarVec tr = forward_kinematics(pr).pos;

  switch (wp.mode) {
    case WaypointMode::MOVE:
      if (norm(tl - wp.left) < 0.003 && norm(tr - wp.right) < 0.003) return true;
      return in_wp > 0.5;
    case WaypointMode::SQUEEZE: {
      const bool forces = s.contact_left.f_normal >= 0.6 * opts_.grip_force &&
                          s.contact_right.f_normal >= 0.6 * opts_.grip_force;
      if (forces && in_wp > 0.12) return true;
      if (norm(tl - wp.left) < 0.003 && norm(tr - wp.right) < 0.003 && in_wp > 0.12) return true;
      return in_wp > 0.7;
    }
    case WaypointMode::PULL:
      // Stop on palm proximity before the position target: driving the object
      // into the palm preloads a spring that squirts it back out in transport.
      if (s.d.palm() <= 0.012) return true;
      if (std::fabs(tl.x - wp.left.x) < 0.004 && std::fabs(tr.x - wp.right.x) < 0.004)
        return true;
      // Generous cap: a heavy object dragged under the force gate can
      // spend most of it, and the attempt clock bounds the whole try.
      return in_wp > 2.0;
  }
  return true;
}

ControlDecision ReflexController::tracking_tick(const SensorSnapshot& s) {
  if (wp_index_ < plan_.size()) {
    Waypoint& wp = plan_[wp_index_];
    // The base is still braking when closing starts and the object itself
    // drifts when grazed, so keep the pinch line on the live palm reading
    // instead of the entry snapshot. One-sided brushes happen all the way
    // in; only a forming two-sided pinch pins the line down. Regrasp
    // pinches get the same treatment: their planned line comes from a
    // contact fit taken before the staging moves, and the object rarely
    // sits still through those. The power wrap is exempt; its final press
    // deliberately squeezes deeper than the line.
    const bool pinch_squeeze = phase_ == GraspPhase::CLOSING ||
                               phase_ == GraspPhase::REGRASP_PINCH_PULL ||
                               phase_ == GraspPhase::REGRASP_ANTIPODAL;
    if (pinch_squeeze && wp.mode == WaypointMode::SQUEEZE &&
        !(s.contact_left.f_normal >= 0.3 && s.contact_right.f_normal >= 0.3) &&
        s.d.palm() < kProximityMax) {
      const double reach_cap =
          geo_.link_lengths[0] + geo_.link_lengths[1] + geo_.link_lengths[2] - 0.005;
      const double touch_y = 0.5 * opts_.expected_diameter + geo_.tip_radius;
      const double x_eq = geo_.palm_face_x + s.d.palm() + 0.5 * opts_.expected_diameter + 0.0015;
      wp.left = clamp_squeeze({x_eq, 0.004}, touch_y, geo_.base_left, reach_cap);
      wp.right = clamp_squeeze({x_eq, -0.004}, -touch_y, geo_.base_right, reach_cap);
      if (wp.left.x + 0.001 < x_eq || wp.right.x + 0.001 < x_eq) {
        // The line itself is past reach at the contact chord. Pressing
        // from here would wedge the object away on its front flanks, so
        // park the y targets at the tips and wait; the base keeps walking
        // in while the palm still sees an equator it cannot serve.
        FingerState pl = make_finger(geo_, FingerSide::left);
        pl.q = q_des_left_;
        FingerState pr = make_finger(geo_, FingerSide::right);
        pr.q = q_des_right_;
        wp.left.y = forward_kinematics(pl).pos.y;
        wp.right.y = forward_kinematics(pr).pos.y;
      }
    }
    integrate_toward(wp, s);
    if (waypoint_done(wp, s, s.time)) {
      if (wp.mode == WaypointMode::PULL && s.d.palm() > 0.03) {
        // The drag ended with the object still far out. The follow-up
        // squeeze was planned for the home line and would close on air,
        // so hand the attempt to the evaluator for a fresh plan instead.
        enter(GraspPhase::EVALUATE, s.time);
      } else {
        ++wp_index_;
        wp_entry_ = s.time;
      }
    }
  }
  if (wp_index_ >= plan_.size()) {
    enter(GraspPhase::EVALUATE, s.time);
  }

  ControlDecision d = hold_tick();
  d.left.qd_des = qd_des_left_;
  d.right.qd_des = qd_des_right_;
  d.phase = phase_;
  return d;
}

ControlDecision ReflexController::evaluate_tick(const SensorSnapshot& s) {
  ControlDecision d = hold_tick();
  if (s.time - phase_entry_ < 0.05) return d;

  bool ok = evaluate_success(s.contact_left, s.contact_right, norm(s.tip_vel_left),
                             norm(s.tip_vel_right), s.d.palm(), cfg_);
  // A power wrap is not expected to end antipodal; every pinch-type attempt
  // is, and rejecting here is what turns a balanced non-pinch into a
  // recoverable failure instead of a transport drop.
  const bool pinch_type = last_branch_ != RegraspBranch::POWER_WRAP;
  if (ok && opts_.antipodal_check && pinch_type) {
    ok = normals_antipodal(s.contact_left, s.tip_left, s.contact_right, s.tip_right, cfg_.gamma_a);
  }

  if (ok) {
    enter(GraspPhase::TRANSPORT, s.time);
    d.phase = phase_;
    return d;
  }

  if (opts_.regrasp_enabled && regrasp_count_ < opts_.max_regrasps) {
    const auto est = estimate_object(s.contact_left, s.tip_left, s.contact_right, s.tip_right,
                                     geo_.tip_radius);
    const RegraspPlan plan = plan_regrasp(est, s.tip_left.pos, s.tip_right.pos, cfg_, geo_,
                                          s.d.palm());
    start_plan(plan, s, s.time);
  } else {
    enter(GraspPhase::FAILED, s.time);
  }
  d.phase = phase_;
  return d;
}

} // namespace rg
