#include "rg/world.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace rg {

ObjectState* WorldState::find_object(int id) {
  for (auto& o : objects)
    if (o.disk.id == id) return &o;
  return nullptr;
}

const ObjectState* WorldState::find_object(int id) const {
  for (const auto& o : objects)
    if (o.disk.id == id) return &o;
  return nullptr;
}

namespace {

// Regularized Coulomb friction: saturates at mu * f_n, linear near zero slip.
double friction_force(double mu, double f_n, double v_tangent) {
  const double v_eps = 1e-3; // m/s
  return -mu * f_n * std::tanh(v_tangent / v_eps);
}

struct FingerLoads {
  JointVec tau{};
};

struct Accumulators {
  FingerLoads left, right;
  std::vector<PlanarVec> object_force; // indexed like w.objects
};

PlanarVec world_tip_velocity(const WorldState& w, const FingerState& f) {
  return w.base_vel + w.base.gripper_to_world_vec(tip_velocity(f));
}

bool skip_object(const WorldState& w, int object_id) {
  return w.transport_mode && object_id != w.held_object_id;
}

void tip_contacts_for(const WorldState& w, const FingerState& f, ContactSet& out,
                      Accumulators* acc) {
  const TipPose tp = forward_kinematics(f);
  const PlanarVec tip_world = w.base.gripper_to_world(tp.pos);
  const PlanarVec vtip_world = world_tip_velocity(w, f);
  TipContact best;
  for (size_t i = 0; i < w.objects.size(); ++i) {
    const ObjectState& obj = w.objects[i];
    if (skip_object(w, obj.disk.id)) continue;
    const PlanarVec delta = tip_world - obj.disk.center;
    const double dist = norm(delta);
    const double pen = obj.disk.radius + w.params.tip_radius - dist;
    if (pen <= 0.0 || dist < 1e-9) continue;

    const PlanarVec n_world = delta * (1.0 / dist); // object -> tip
    const PlanarVec v_rel = vtip_world - obj.vel;
    const double closing = -dot(v_rel, n_world);
    const double f_n = std::max(0.0, w.params.k_contact * pen + w.params.b_contact * closing);
    const PlanarVec t_world = perp(n_world);
    const double v_t = dot(v_rel, t_world);
    const double f_t = friction_force(w.params.mu, f_n, v_t);

    const PlanarVec force_on_tip = n_world * f_n + t_world * f_t;
    if (acc) {
      const PlanarVec force_grip = w.base.world_to_gripper_vec(force_on_tip);
      const JointVec tau = tip_force_to_torques(f, force_grip);
      FingerLoads& loads = f.side == FingerSide::left ? acc->left : acc->right;
      for (int k = 0; k < kJointsPerFinger; ++k) loads.tau[k] += tau[k];
      acc->object_force[i] -= force_on_tip;
    }

    TipObjectContact c;
    c.side = f.side;
    c.object_id = obj.disk.id;
    const PlanarVec n_grip = w.base.world_to_gripper_vec(n_world);
    c.normal = n_grip;
    c.point = tp.pos - n_grip * w.params.tip_radius;
    c.penetration = pen;
    c.f_normal = f_n;
    c.f_tangent = f_t;
    c.bearing = wrap_angle(std::atan2(-n_grip.y, -n_grip.x) - tp.heading);
    out.pairs.push_back(c);
    if (f_n > best.f_normal || !best.active) {
      best.active = true;
      best.object_id = obj.disk.id;
      best.f_normal = f_n;
      best.f_shear = f_t;
      best.bearing = c.bearing;
    }
  }
  (f.side == FingerSide::left ? out.left : out.right) = best;
}

void palm_object_forces(const WorldState& w, Accumulators& acc) {
  // Palm pad: capsule along the y axis of the gripper frame.
  const PlanarVec a = w.base.gripper_to_world({0.0, -w.params.palm_half_width});
  const PlanarVec b = w.base.gripper_to_world({0.0, w.params.palm_half_width});
  const PlanarVec ab = b - a;
  const double len2 = norm_sq(ab);
  for (size_t i = 0; i < w.objects.size(); ++i) {
    const ObjectState& obj = w.objects[i];
    if (skip_object(w, obj.disk.id)) continue;
    const double s = len2 > 0.0 ? std::clamp(dot(obj.disk.center - a, ab) / len2, 0.0, 1.0) : 0.0;
    const PlanarVec closest = a + ab * s;
    const PlanarVec delta = obj.disk.center - closest;
    const double dist = norm(delta);
    const double pen = obj.disk.radius + w.params.palm_radius - dist;
    if (pen <= 0.0 || dist < 1e-9) continue;
    const PlanarVec n = delta * (1.0 / dist); // palm -> object
    const PlanarVec v_rel = obj.vel - w.base_vel;
    const double closing = -dot(v_rel, n);
    const double f_n = std::max(0.0, w.params.k_contact * pen + w.params.b_contact * closing);
    const PlanarVec t = perp(n);
    const double f_t = friction_force(w.params.mu, f_n, dot(v_rel, t));
    acc.object_force[i] += n * f_n + t * f_t;
  }
}

void object_object_forces(const WorldState& w, Accumulators& acc) {
  for (size_t i = 0; i < w.objects.size(); ++i) {
    for (size_t j = i + 1; j < w.objects.size(); ++j) {
      // While transporting, the held object passes over its neighbors.
      if (w.transport_mode && (w.objects[i].disk.id == w.held_object_id ||
                               w.objects[j].disk.id == w.held_object_id))
        continue;
      const ObjectState& oa = w.objects[i];
      const ObjectState& ob = w.objects[j];
      const PlanarVec delta = ob.disk.center - oa.disk.center;
      const double dist = norm(delta);
      const double pen = oa.disk.radius + ob.disk.radius - dist;
      if (pen <= 0.0 || dist < 1e-9) continue;
      const PlanarVec n = delta * (1.0 / dist); // a -> b
      const PlanarVec v_rel = ob.vel - oa.vel;
      const double closing = -dot(v_rel, n);
      const double f_n = std::max(0.0, w.params.k_contact * pen + w.params.b_contact * closing);
      const PlanarVec t = perp(n);
      const double f_t = friction_force(w.params.mu, f_n, dot(v_rel, t));
      const PlanarVec f_on_b = n * f_n + t * f_t;
      acc.object_force[j] += f_on_b;
      acc.object_force[i] -= f_on_b;
    }
  }
}

void check_finite(const WorldState& w) {
  auto bad = [](double v) { return !std::isfinite(v); };
  for (const FingerState* f : {&w.left, &w.right}) {
    const char* side = f->side == FingerSide::left ? "left" : "right";
    for (int i = 0; i < kJointsPerFinger; ++i) {
      if (bad(f->q[i]) || bad(f->qd[i]))
        throw SimulationDiverged(std::string("finger_") + side + "_joint_" +
                                 std::to_string(i + 1) + " diverged");
    }
  }
  for (const ObjectState& o : w.objects) {
    if (bad(o.disk.center.x) || bad(o.disk.center.y) || bad(o.vel.x) || bad(o.vel.y))
      throw SimulationDiverged("object_" + std::to_string(o.disk.id) + " diverged");
  }
  if (bad(w.base.origin.x) || bad(w.base.origin.y)) throw SimulationDiverged("base diverged");
}

} // namespace

ContactSet resolve_contacts(const WorldState& w) {
  ContactSet set;
  tip_contacts_for(w, w.left, set, nullptr);
  tip_contacts_for(w, w.right, set, nullptr);
  return set;
}

void step(WorldState& w, const JointVec& tau_left, const JointVec& tau_right, double dt) {
  if (std::fabs(dt - w.params.dt) > 1e-15)
    throw std::invalid_argument("step: dt must equal params.dt");
  for (int i = 0; i < kJointsPerFinger; ++i) {
    if (!std::isfinite(tau_left[i]) || !std::isfinite(tau_right[i]))
      throw SimulationDiverged("commanded torque diverged");
  }

  Accumulators acc;
  acc.object_force.resize(w.objects.size());
  ContactSet set;
  tip_contacts_for(w, w.left, set, &acc);
  tip_contacts_for(w, w.right, set, &acc);
  palm_object_forces(w, acc);
  object_object_forces(w, acc);

  // Objects: semi-implicit Euler with sliding friction and a speed cap.
  for (size_t i = 0; i < w.objects.size(); ++i) {
    ObjectState& o = w.objects[i];
    o.vel += acc.object_force[i] * (dt / o.disk.mass);
    const double speed = norm(o.vel);
    if (speed > 0.0) {
      const double drop = w.params.ground_decel * dt;
      const double next = std::min(std::max(speed - drop, 0.0), w.params.v_max);
      o.vel = o.vel * (speed > 0.0 ? next / speed : 0.0);
    }
    o.disk.center += o.vel * dt;
  }

  // Fingers: per-joint dynamics with hard stops and viscous damping.
  auto advance_finger = [&](FingerState& f, const JointVec& tau_cmd, const FingerLoads& loads) {
    for (int i = 0; i < kJointsPerFinger; ++i) {
      double tau = tau_cmd[i] + loads.tau[i] - w.params.joint_viscous * f.qd[i];
      if (f.q[i] > w.params.joint_limit)
        tau += -w.params.stop_stiffness * (f.q[i] - w.params.joint_limit) -
               w.params.stop_damping * f.qd[i];
      else if (f.q[i] < -w.params.joint_limit)
        tau += -w.params.stop_stiffness * (f.q[i] + w.params.joint_limit) -
               w.params.stop_damping * f.qd[i];
      f.qd[i] += tau / w.params.joint_inertia[i] * dt;
      f.qd[i] = std::clamp(f.qd[i], -w.params.qd_max, w.params.qd_max);
      f.q[i] += f.qd[i] * dt;
    }
  };
  advance_finger(w.left, tau_left, acc.left);
  advance_finger(w.right, tau_right, acc.right);

  // Base: kinematic with a velocity ramp.
  const PlanarVec dv = w.base_vel_target - w.base_vel;
  const double dv_norm = norm(dv);
  const double dv_cap = w.params.base_accel * dt;
  w.base_vel = dv_norm <= dv_cap ? w.base_vel_target : w.base_vel + dv * (dv_cap / dv_norm);
  w.base.origin += w.base_vel * dt;

  w.time += dt;
  ++w.step_count;
  check_finite(w);
}

TransportReport transport_check(WorldState& w, const FingerCommand& hold_left,
                                const FingerCommand& hold_right, PlanarVec place_base_target,
                                double gamma_f) {
  TransportReport report;
  const PlanarVec start = w.base.origin;

  // The held object is whichever both tips are pressing on right now.
  const ContactSet entry = resolve_contacts(w);
  const bool both = entry.left.active && entry.right.active &&
                    entry.left.object_id == entry.right.object_id;
  if (!both) {
    report.verdict = TransportVerdict::DROPPED;
    return report;
  }
  const int held = entry.left.object_id;
  const ObjectState* obj = w.find_object(held);
  const PlanarVec rel_initial = w.base.world_to_gripper(obj->disk.center);

  w.transport_mode = true;
  w.held_object_id = held;

  const double t_start = w.time;
  const double guard = 60.0;
  TransportVerdict verdict = TransportVerdict::HELD;
  while (true) {
    const PlanarVec to_go = place_base_target - w.base.origin;
    const double remaining = norm(to_go);
    if (remaining < 0.002) break;
    if (w.time - t_start > guard) {
      verdict = TransportVerdict::DROPPED;
      break;
    }

    // Ramp-limited approach with a braking profile into the place point.
    const double brake = std::sqrt(2.0 * w.params.base_accel * std::max(remaining - 0.0015, 0.0));
    w.base_vel_target = normalized(to_go) * std::min(w.params.transport_speed, brake);

    const JointVec tl = pd_torque(hold_left.q_des, hold_left.qd_des, w.left.q, w.left.qd,
                                  hold_left.tau_ff, w.gains, hold_left.kp_scale);
    const JointVec tr = pd_torque(hold_right.q_des, hold_right.qd_des, w.right.q, w.right.qd,
                                  hold_right.tau_ff, w.gains, hold_right.kp_scale);
    step(w, tl, tr, w.params.dt);

    if (w.step_count % w.params.sense_every == 0) {
      const ContactSet now = resolve_contacts(w);
      const bool grip = now.left.active && now.right.active &&
                        now.left.object_id == held && now.right.object_id == held &&
                        now.left.f_normal > gamma_f && now.right.f_normal > gamma_f;
      const ObjectState* ob = w.find_object(held);
      const PlanarVec rel = w.base.world_to_gripper(ob->disk.center);
      if (!grip || norm(rel - rel_initial) > 0.02) {
        if (std::getenv("RG_DEBUG_TRANSPORT")) {
          std::fprintf(stderr,
                       "transport drop t=%.3f fl=%.3f fr=%.3f lact=%d ract=%d shift=%.4f "
                       "rel=(%.4f,%.4f) rel0=(%.4f,%.4f)\n",
                       w.time, now.left.f_normal, now.right.f_normal, (int)now.left.active,
                       (int)now.right.active, norm(rel - rel_initial), rel.x, rel.y,
                       rel_initial.x, rel_initial.y);
        }
        verdict = TransportVerdict::DROPPED;
        report.drop_distance = norm(w.base.origin - start);
        break;
      }
    }
  }

  w.base_vel_target = {0.0, 0.0};
  w.transport_mode = false;
  w.held_object_id = -1;
  report.verdict = verdict;
  report.duration = w.time - t_start;
  report.distance = norm(w.base.origin - start);
  return report;
}

} // namespace rg
