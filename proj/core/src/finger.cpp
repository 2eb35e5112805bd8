#include "rg/finger.hpp"

#include <algorithm>
#include <cmath>

namespace rg {

std::array<PlanarVec, kJointsPerFinger + 1> joint_positions(const FingerState& f) {
  std::array<PlanarVec, kJointsPerFinger + 1> pts;
  PlanarVec p = f.base_offset;
  double heading = f.mount_heading;
  pts[0] = p;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    heading += f.q[i];
    p += f.link_lengths[i] * unit_vec(heading);
    pts[i + 1] = p;
  }
  return pts;
}

TipPose forward_kinematics(const FingerState& f) {
  const auto pts = joint_positions(f);
  double heading = f.mount_heading;
  for (int i = 0; i < kJointsPerFinger; ++i) heading += f.q[i];
  return {pts[kJointsPerFinger], wrap_angle(heading)};
}

TipJacobian tip_jacobian(const FingerState& f) {
  const auto pts = joint_positions(f);
  const PlanarVec tip = pts[kJointsPerFinger];
  TipJacobian jac{};
  for (int i = 0; i < kJointsPerFinger; ++i) {
    // Column i: rotation about joint i moves the tip along perp(tip - joint_i).
    const PlanarVec r = perp(tip - pts[i]);
    jac[0][i] = r.x;
    jac[1][i] = r.y;
  }
  return jac;
}

PlanarVec tip_velocity(const FingerState& f) {
  const TipJacobian j = tip_jacobian(f);
  PlanarVec v;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    v.x += j[0][i] * f.qd[i];
    v.y += j[1][i] * f.qd[i];
  }
  return v;
}

JointVec pd_torque(const JointVec& q_des, const JointVec& qd_des, const JointVec& q,
                   const JointVec& qd, const JointVec& tau_ff, const JointGains& gains,
                   double kp_scale) {
  JointVec tau;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    const double t = kp_scale * gains.kp[i] * (q_des[i] - q[i]) +
                     gains.kd[i] * (qd_des[i] - qd[i]) + tau_ff[i];
    tau[i] = std::clamp(t, -gains.tau_max, gains.tau_max);
  }
  return tau;
}

JointVec tip_force_to_torques(const FingerState& f, PlanarVec force) {
  const TipJacobian j = tip_jacobian(f);
  JointVec tau;
  for (int i = 0; i < kJointsPerFinger; ++i) tau[i] = j[0][i] * force.x + j[1][i] * force.y;
  return tau;
}

JointVec resolved_rate(const FingerState& f, const JointVec& q_from, PlanarVec tip_vel,
                       const JointVec& q_ref, double null_gain) {
  FingerState probe = f;
  probe.q = q_from;
  const TipJacobian j = tip_jacobian(probe);

  // J J^T + lambda^2 I, inverted directly (2x2).
  const double lambda2 = 0.003 * 0.003;
  double a = lambda2, b = 0.0, d = lambda2;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    a += j[0][i] * j[0][i];
    b += j[0][i] * j[1][i];
    d += j[1][i] * j[1][i];
  }
  const double det = a * d - b * b;
  const double wx = (d * tip_vel.x - b * tip_vel.y) / det;
  const double wy = (-b * tip_vel.x + a * tip_vel.y) / det;

  JointVec qd;
  for (int i = 0; i < kJointsPerFinger; ++i) qd[i] = j[0][i] * wx + j[1][i] * wy;

  // Null-space: pull toward q_ref without disturbing the tip.
  JointVec bias;
  for (int i = 0; i < kJointsPerFinger; ++i) bias[i] = null_gain * (q_ref[i] - q_from[i]);
  const double bvx = j[0][0] * bias[0] + j[0][1] * bias[1] + j[0][2] * bias[2];
  const double bvy = j[1][0] * bias[0] + j[1][1] * bias[1] + j[1][2] * bias[2];
  const double nx = (d * bvx - b * bvy) / det;
  const double ny = (-b * bvx + a * bvy) / det;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    qd[i] += bias[i] - (j[0][i] * nx + j[1][i] * ny);
  }
  return qd;
}

std::optional<JointVec> solve_tip_ik(const FingerState& f, PlanarVec tip_target,
                                     double heading_target, const JointVec& q_init) {
  FingerState probe = f;
  probe.q = q_init;
  for (int iter = 0; iter < 60; ++iter) {
    const TipPose tp = forward_kinematics(probe);
    const PlanarVec ep = tip_target - tp.pos;
    const double eh = wrap_angle(heading_target - tp.heading);
    if (norm(ep) < 1e-10 && std::fabs(eh) < 1e-10) return probe.q;

    // Augmented 3x3 Jacobian: tip position rows plus the heading row (1,1,1).
    const TipJacobian j = tip_jacobian(probe);
    double m[3][4] = {
        {j[0][0], j[0][1], j[0][2], ep.x},
        {j[1][0], j[1][1], j[1][2], ep.y},
        {1.0, 1.0, 1.0, eh},
    };
    for (int i = 0; i < 3; ++i) m[i][i] += (i < 2 ? 1e-9 : 0.0);

    // Gaussian elimination with partial pivoting.
    bool singular = false;
    for (int col = 0; col < 3; ++col) {
      int piv = col;
      for (int r = col + 1; r < 3; ++r)
        if (std::fabs(m[r][col]) > std::fabs(m[piv][col])) piv = r;
      if (std::fabs(m[piv][col]) < 1e-12) { singular = true; break; }
      if (piv != col) std::swap(m[piv], m[col]);
      for (int r = 0; r < 3; ++r) {
        if (r == col) continue;
        const double k = m[r][col] / m[col][col];
        for (int c = col; c < 4; ++c) m[r][c] -= k * m[col][c];
      }
    }
    if (singular) return std::nullopt;
    for (int i = 0; i < kJointsPerFinger; ++i) {
      double step = m[i][3] / m[i][i];
      step = std::clamp(step, -0.5, 0.5);
      probe.q[i] += step;
    }
  }
  return std::nullopt;
}

} // namespace rg
