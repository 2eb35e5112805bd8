#include "rg/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rg {

BaselineController::BaselineController(const ReflexConfig& cfg, const HandGeometry& geo,
                                       double object_diameter)
    : geo_(geo) {
  if (!(object_diameter > 0.0))
    throw std::invalid_argument("baseline: object diameter must be > 0");

  // Tip centers sit half the commanded width plus the clearance apart.
  const double y_open =
      0.5 * (object_diameter + cfg.clearance_baseline) + geo.tip_radius;
  const FingerState left = make_finger(geo, FingerSide::left);

  // Straight-ahead approach pose; shorten the reach if the drop from the
  // finger base is too deep for the chain.
  const double total = geo.link_lengths[0] + geo.link_lengths[1] + geo.link_lengths[2];
  double x = tip_x_;
  const double drop = std::fabs(y_open - geo.base_left.y);
  const double limit = std::sqrt(std::max(total * total - drop * drop, 1e-6)) - 0.012;
  x = std::min(x, limit);
  tip_x_ = x;

  const JointVec seed = {-0.4, 0.3, 0.1};
  auto open_q = solve_tip_ik(left, {x, y_open}, 0.0, seed);
  auto pinch_q = solve_tip_ik(left, {x, 0.004}, -0.35, {-0.7, 0.25, 0.2});
  if (!pinch_q) pinch_q = solve_tip_ik(left, {x, 0.004}, 0.0, {-0.7, 0.25, 0.45});
  if (!open_q || !pinch_q)
    throw std::invalid_argument("baseline: no finger pose for commanded diameter");
  q_approach_left_ = *open_q;
  q_pinch_left_ = *pinch_q;
}

JointVec BaselineController::approach_pose(FingerSide side) const {
  JointVec q = q_approach_left_;
  if (side == FingerSide::right)
    for (double& v : q) v = -v;
  return q;
}

ControlDecision BaselineController::tick(const BaselineSnapshot& s) {
  if (phase_ == GraspPhase::APPROACH && s.base_reached) {
    phase_ = GraspPhase::CLOSING;
    close_start_ = s.time;
  }
  if (phase_ == GraspPhase::CLOSING && s.time - close_start_ >= kCloseDuration) {
    phase_ = GraspPhase::TRANSPORT;
  }

  double alpha = 0.0;
  if (phase_ == GraspPhase::CLOSING)
    alpha = std::clamp((s.time - close_start_) / kCloseDuration, 0.0, 1.0);
  else if (phase_ != GraspPhase::APPROACH)
    alpha = 1.0;

  ControlDecision d;
  d.phase = phase_;
  d.halt_base = phase_ != GraspPhase::APPROACH;
  for (int i = 0; i < kJointsPerFinger; ++i) {
    const double q = (1.0 - alpha) * q_approach_left_[i] + alpha * q_pinch_left_[i];
    d.left.q_des[i] = q;
    d.right.q_des[i] = -q;
  }
  return d;
}

} // namespace rg
