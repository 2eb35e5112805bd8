#ifndef RG_BASELINE_HPP
#define RG_BASELINE_HPP

#include "rg/config.hpp"
#include "rg/controller.hpp"

namespace rg {

// Open-loop pinch: approach with the fingers slightly wider than the
// commanded diameter, close on a fixed 1 s joint trajectory once the base
// arrives, then transport. No sensing, no verification; its command
// sequence depends only on time and the approach progress flag.
class BaselineController {
 public:
  BaselineController(const ReflexConfig& cfg, const HandGeometry& geo, double object_diameter);

  ControlDecision tick(const BaselineSnapshot& s);

  GraspPhase phase() const { return phase_; }
  double approach_tip_x() const { return tip_x_; }
  JointVec approach_pose(FingerSide side) const;

  static constexpr double kCloseDuration = 1.0; // s

 private:
  HandGeometry geo_;
  double tip_x_ = 0.125;
  JointVec q_approach_left_{};
  JointVec q_pinch_left_{};
  GraspPhase phase_ = GraspPhase::APPROACH;
  double close_start_ = 0.0;
};

} // namespace rg

#endif
