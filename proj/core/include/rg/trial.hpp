#ifndef RG_TRIAL_HPP
#define RG_TRIAL_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rg/config.hpp"
#include "rg/controller.hpp"
#include "rg/reflex.hpp"
#include "rg/world.hpp"

namespace rg {

enum class ControllerKind { baseline, partial_reflex, full_reflex };

const char* controller_name(ControllerKind k);
std::optional<ControllerKind> controller_from_name(const std::string& name);

// Deterministic per-task seed derivation.
uint64_t mix_seed(uint64_t base, uint64_t salt);

struct TrialSpec {
  ControllerKind controller = ControllerKind::full_reflex;
  std::vector<DiskObject> objects;
  int target_object_id = -1;
  PlanarVec commanded_target{0.30, 0.0};
  double commanded_diameter = 0.065; // told to the baseline only
  PlanarVec base_start{0.0, 0.0};
  std::optional<PlanarVec> place_base_target; // default: 35 cm to the right
  uint64_t seed = 1;
  bool sensor_noise = true;
  ReflexOptions reflex_options;
  SimParams sim;
  JointGains gains;
};

struct TrialRecord {
  ControllerKind controller = ControllerKind::full_reflex;
  int target_object_id = -1;
  std::string label;
  double obj_x = 0.0, obj_y = 0.0, obj_r = 0.0;
  double target_x = 0.0, target_y = 0.0;
  bool succeeded = false;
  bool dropped_in_transport = false;
  double pick_time = -1.0;  // start to verified grasp; -1 when never grasped
  double place_time = -1.0; // transport duration
  int regrasp_count = 0;
  bool used_pinch_pull = false;
  bool used_antipodal = false;
  bool used_power_wrap = false;
  bool diverged = false;
  uint64_t seed = 0;
  double sim_time = 0.0;
  long steps = 0;
  // Scene state when the trial ended, minus a successfully removed target.
  std::vector<DiskObject> final_objects;
};

// Per-control-tick trace of one trial, serializable as CSV.
class EventLog {
 public:
  void append_header();
  void append_row(double time, GraspPhase phase, const TriggerFlags& trig, RegraspBranch branch,
                  const ProximityVector& d, const ContactReading& cl, const ContactReading& cr,
                  PlanarVec tip_l, PlanarVec tip_r, PlanarVec base, PlanarVec obj);
  const std::string& csv() const { return buf_; }
  void clear() { buf_.clear(); }

 private:
  std::string buf_;
};

// One simulated pick and place. Deterministic for a fixed spec.
TrialRecord run_trial(const TrialSpec& spec, const ReflexConfig& cfg, EventLog* log = nullptr);

std::string trial_csv_header();
std::string trial_csv_row(const TrialRecord& r);

} // namespace rg

#endif
