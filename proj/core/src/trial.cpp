#include "rg/trial.hpp"

#include <cmath>
#include <cstdio>

#include "rg/baseline.hpp"

namespace rg {

const char* controller_name(ControllerKind k) {
  switch (k) {
    case ControllerKind::baseline: return "baseline";
    case ControllerKind::partial_reflex: return "partial";
    case ControllerKind::full_reflex: return "full";
  }
  return "?";
}

std::optional<ControllerKind> controller_from_name(const std::string& name) {
  if (name == "baseline") return ControllerKind::baseline;
  if (name == "partial") return ControllerKind::partial_reflex;
  if (name == "full") return ControllerKind::full_reflex;
  return std::nullopt;
}

uint64_t mix_seed(uint64_t base, uint64_t salt) {
  // splitmix64 step, keyed by the salt
  uint64_t z = base + salt * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

void EventLog::append_header() {
  buf_ +=
      "time,phase,trig_near,trig_far,trig_tips,trig_occlude,branch,"
      "d_l_out,d_l_fwd,d_l_in,d_palm,d_r_in,d_r_fwd,d_r_out,"
      "f_l_n,f_l_t,f_r_n,f_r_t,tip_l_x,tip_l_y,tip_r_x,tip_r_y,"
      "base_x,base_y,obj_x,obj_y\n";
}

void EventLog::append_row(double time, GraspPhase phase, const TriggerFlags& trig,
                          RegraspBranch branch, const ProximityVector& d,
                          const ContactReading& cl, const ContactReading& cr, PlanarVec tip_l,
                          PlanarVec tip_r, PlanarVec base, PlanarVec obj) {
  char line[512];
  std::snprintf(line, sizeof line,
                "%.6f,%s,%d,%d,%d,%d,%s,"
                "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                "%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,"
                "%.6f,%.6f,%.6f,%.6f\n",
                time, phase_name(phase), trig.near ? 1 : 0, trig.far ? 1 : 0, trig.tips ? 1 : 0,
                trig.occlude ? 1 : 0, branch_name(branch), d.l_out(), d.l_forward(), d.l_in(),
                d.palm(), d.r_in(), d.r_forward(), d.r_out(), cl.f_normal, cl.f_shear,
                cr.f_normal, cr.f_shear, tip_l.x, tip_l.y, tip_r.x, tip_r.y, base.x, base.y,
                obj.x, obj.y);
  buf_ += line;
}

namespace {

bool finite_vec(PlanarVec v) { return std::isfinite(v.x) && std::isfinite(v.y); }

} // namespace

TrialRecord run_trial(const TrialSpec& spec, const ReflexConfig& cfg, EventLog* log) {
  cfg.validate();

  HandGeometry geo;
  geo.tip_radius = spec.sim.tip_radius;
  geo.palm_face_x = spec.sim.palm_radius;
  geo.joint_limit = spec.sim.joint_limit;

  TrialRecord rec;
  rec.controller = spec.controller;
  rec.target_object_id = spec.target_object_id;
  rec.target_x = spec.commanded_target.x;
  rec.target_y = spec.commanded_target.y;
  rec.seed = spec.seed;
  for (const DiskObject& o : spec.objects) {
    if (o.id == spec.target_object_id) {
      rec.label = o.label;
      rec.obj_x = o.center.x;
      rec.obj_y = o.center.y;
      rec.obj_r = o.radius;
    }
  }

  WorldState w;
  w.params = spec.sim;
  w.gains = spec.gains;
  PlanarVec to_target = spec.commanded_target - spec.base_start;
  double heading = norm(to_target) > 1e-9 ? std::atan2(to_target.y, to_target.x) : 0.0;
  w.base = GripperFrame{spec.base_start, heading};
  w.left = make_finger(geo, FingerSide::left);
  w.right = make_finger(geo, FingerSide::right);
  for (const DiskObject& o : spec.objects) w.objects.push_back({o, PlanarVec{}});
  w.rng.seed(spec.seed);

  const double dt = spec.sim.dt;
  const double dt_ctrl = dt * spec.sim.ctrl_every;

  std::optional<ReflexController> reflex;
  std::optional<BaselineController> baseline;
  double nominal_tip_x;
  if (spec.controller == ControllerKind::baseline) {
    baseline.emplace(cfg, geo, spec.commanded_diameter);
    nominal_tip_x = baseline->approach_tip_x();
  } else {
    ReflexOptions opts = spec.reflex_options;
    opts.regrasp_enabled = spec.controller == ControllerKind::full_reflex;
    opts.expected_diameter = spec.commanded_diameter;
    reflex.emplace(cfg, opts, geo, dt_ctrl);
    nominal_tip_x = reflex->approach_tip_x();
  }

  // Stop the base with the nominal grasp point on the commanded target.
  PlanarVec u{std::cos(heading), std::sin(heading)};
  PlanarVec stop = spec.commanded_target - nominal_tip_x * u;
  if (dot(stop - spec.base_start, u) < 0.0) stop = spec.base_start;

  ContactNoise noise;
  noise.enabled = spec.sensor_noise;

  if (log) log->append_header();

  SensorSnapshot snap;
  ControlDecision dec;
  bool reached = false;
  double stop_extension = 0.0;
  bool carrot_creep = false;
  bool entered_transport = false;
  const double t_guard = 30.0;

  try {
    for (;;) {
      if (w.time >= t_guard) break;

      double remaining = dot(stop - w.base.origin, u);

      if (w.step_count % spec.sim.sense_every == 0) {
        std::vector<DiskObject> disks;
        disks.reserve(w.objects.size());
        for (const ObjectState& os : w.objects) {
          DiskObject d = os.disk;
          d.center = w.base.world_to_gripper(os.disk.center);
          disks.push_back(d);
        }
        snap.time = w.time;
        snap.d = sample_proximity(w.left, w.right, geo.tip_radius, geo.palm_face_x, disks);
        // The commanded point often comes from a range-biased centroid. If
        // the stop comes up with no trigger fired but the palm ray still
        // sees a surface ahead, keep the stop 8 mm in front of the base so
        // the proximity triggers get to finish the approach (5 cm budget).
        // The same budget keeps paying out after the triggers fire when
        // the surface the palm sees implies an equator the fingers cannot
        // reach; squeezing at full stretch only bulldozes the object
        // further away, and the few extra centimeters of base travel are
        // what turn those grasps from hopeless into routine. Reflex
        // controllers only; the baseline is the open-loop contrast and
        // parks where it was told.
        carrot_creep = false;
        if (reflex && stop_extension < 0.05 && snap.d.palm() < kProximityMax) {
          const GraspPhase ph = reflex->phase();
          bool creep = ph == GraspPhase::APPROACH && !reached;
          if (ph == GraspPhase::CLOSING || ph == GraspPhase::EVALUATE ||
              ph == GraspPhase::REGRASP_PINCH_PULL || ph == GraspPhase::REGRASP_ANTIPODAL ||
              ph == GraspPhase::REGRASP_POWER_WRAP) {
            const double reach_cap =
                geo.link_lengths[0] + geo.link_lengths[1] + geo.link_lengths[2] - 0.005;
            const double x_eq =
                geo.palm_face_x + snap.d.palm() + 0.5 * spec.commanded_diameter;
            creep = x_eq > reach_cap - 0.002;
          }
          carrot_creep = creep;
          if (creep && remaining < 0.008) {
            const double push = std::min(0.008 - remaining, 0.05 - stop_extension);
            if (push > 0.0) {
              stop += u * push;
              stop_extension += push;
              remaining = dot(stop - w.base.origin, u);
            }
          }
        }
        ContactSet cs = resolve_contacts(w);
        snap.contact_left = sense_contact(cs.left, noise, w.rng);
        snap.contact_right = sense_contact(cs.right, noise, w.rng);
        snap.tip_left = forward_kinematics(w.left);
        snap.tip_right = forward_kinematics(w.right);
        snap.tip_vel_left = tip_velocity(w.left);
        snap.tip_vel_right = tip_velocity(w.right);
        snap.q_left = w.left.q;
        snap.qd_left = w.left.qd;
        snap.q_right = w.right.q;
        snap.qd_right = w.right.qd;
        snap.base_reached = reached;
      }
      if (remaining < 0.0015) {
        reached = true;
        snap.base_reached = true;
      }

      if (w.step_count % spec.sim.ctrl_every == 0) {
        TriggerFlags trig;
        RegraspBranch branch = RegraspBranch::NONE;
        if (reflex) {
          dec = reflex->tick(snap);
          trig = evaluate_triggers(snap.d,
                                   signed_tip_heading(FingerSide::left, snap.tip_left.heading),
                                   signed_tip_heading(FingerSide::right, snap.tip_right.heading),
                                   cfg);
          branch = reflex->last_branch();
        } else {
          BaselineSnapshot bs;
          bs.time = w.time;
          bs.q_left = w.left.q;
          bs.qd_left = w.left.qd;
          bs.q_right = w.right.q;
          bs.qd_right = w.right.qd;
          bs.base_reached = reached;
          dec = baseline->tick(bs);
        }
        if (log) {
          PlanarVec obj;
          if (const ObjectState* os = w.find_object(spec.target_object_id)) obj = os->disk.center;
          log->append_row(w.time, dec.phase, trig, branch, snap.d, snap.contact_left,
                          snap.contact_right, snap.tip_left.pos, snap.tip_right.pos,
                          w.base.origin, obj);
        }
        if (dec.phase == GraspPhase::TRANSPORT) {
          entered_transport = true;
          break;
        }
        if (dec.phase == GraspPhase::FAILED) break;
      }

      if ((dec.halt_base || reached) && !carrot_creep) {
        w.base_vel_target = PlanarVec{};
      } else {
        double v = std::min(spec.sim.approach_speed,
                            std::sqrt(2.0 * spec.sim.base_accel *
                                      std::max(remaining - 0.001, 0.0)));
        w.base_vel_target = v * u;
      }

      JointVec tau_l = pd_torque(dec.left.q_des, dec.left.qd_des, w.left.q, w.left.qd,
                                 dec.left.tau_ff, w.gains, dec.left.kp_scale);
      JointVec tau_r = pd_torque(dec.right.q_des, dec.right.qd_des, w.right.q, w.right.qd,
                                 dec.right.tau_ff, w.gains, dec.right.kp_scale);
      step(w, tau_l, tau_r, dt);
    }

    if (entered_transport) {
      rec.pick_time = w.time;
      PlanarVec place = spec.place_base_target ? *spec.place_base_target
                                               : w.base.gripper_to_world(PlanarVec{0.0, -0.35});
      TransportReport rep = transport_check(w, dec.left, dec.right, place, cfg.gamma_f);
      rec.place_time = rep.duration;
      rec.succeeded = rep.verdict == TransportVerdict::HELD;
      rec.dropped_in_transport = !rec.succeeded;
      if (reflex) reflex->notify_transport(rec.succeeded, w.time);
    }
  } catch (const SimulationDiverged&) {
    rec.diverged = true;
    rec.succeeded = false;
  }

  if (reflex) {
    rec.regrasp_count = reflex->regrasp_count();
    rec.used_pinch_pull = reflex->branch_seen(RegraspBranch::PINCH_PULL);
    rec.used_antipodal = reflex->branch_seen(RegraspBranch::ANTIPODAL);
    rec.used_power_wrap = reflex->branch_seen(RegraspBranch::POWER_WRAP);
  }
  rec.sim_time = w.time;
  rec.steps = w.step_count;

  if (rec.diverged) {
    rec.final_objects = spec.objects;
  } else {
    int removed = rec.succeeded ? w.held_object_id : -1;
    for (const ObjectState& os : w.objects) {
      if (os.disk.id == removed) continue;
      DiskObject d = os.disk;
      if (!finite_vec(d.center)) {
        for (const DiskObject& o : spec.objects)
          if (o.id == d.id) d.center = o.center;
      }
      rec.final_objects.push_back(d);
    }
  }
  return rec;
}

std::string trial_csv_header() {
  return "controller,label,object_id,obj_x,obj_y,obj_r,target_x,target_y,outcome,dropped,"
         "pick_time,place_time,regrasps,pinch_pull,antipodal,power_wrap,diverged,seed,"
         "sim_time,steps\n";
}

std::string trial_csv_row(const TrialRecord& r) {
  char line[512];
  std::snprintf(line, sizeof line,
                "%s,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%d,%.6f,%.6f,%d,%d,%d,%d,%d,%llu,%.6f,%ld\n",
                controller_name(r.controller), r.label.c_str(), r.target_object_id, r.obj_x,
                r.obj_y, r.obj_r, r.target_x, r.target_y,
                r.succeeded ? "SUCCEEDED" : "FAILED", r.dropped_in_transport ? 1 : 0,
                r.pick_time, r.place_time, r.regrasp_count, r.used_pinch_pull ? 1 : 0,
                r.used_antipodal ? 1 : 0, r.used_power_wrap ? 1 : 0, r.diverged ? 1 : 0,
                static_cast<unsigned long long>(r.seed), r.sim_time, r.steps);
  return line;
}

} // namespace rg
