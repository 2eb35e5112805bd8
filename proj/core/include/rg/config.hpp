#ifndef RG_CONFIG_HPP
#define RG_CONFIG_HPP

#include <stdexcept>
#include <string>

namespace rg {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Controller constants, SI units throughout. Defaults are the tuned values
// the rest of the library is calibrated against.
struct ReflexConfig {
  // Proximity field activation thresholds and the inward set-point (m).
  double d_thresh_out = 0.09;
  double d_thresh_forward = 0.09;
  double d_thresh_in = 0.09;
  double d_des_in = 0.06;

  // Field stiffnesses (N/m).
  double k_out = 20.0;
  double k_forward = 30.0;
  double k_in = 12.0;

  // Grasp trigger distances (m).
  double d_near = 0.05;
  double d_far = 0.09;
  double d_occlude = 0.04;

  // Fingertip wrap threshold (rad): a distal link rotated at or past
  // parallel with the approach axis counts as wrapped.
  double theta_close = 0.0;

  // Antipodality tolerance for pinch checks (rad, 20 deg).
  double gamma_a = 0.3490658503988659;

  // Largest radius still taken with an antipodal pinch (m).
  double r_power = 0.03;

  // Grasp verification thresholds: tip speed (m/s) and grip force (N).
  double gamma_v = 0.2;
  double gamma_f = 0.5;

  // Give-up budget for one grasp attempt, re-grasps included (s).
  double t_fail = 3.0;

  // Baseline controller: gap between fingertip surfaces and the commanded
  // object diameter while approaching (m).
  double clearance_baseline = 0.01;

  // Throws ConfigError naming the offending field if a constraint fails.
  void validate() const;
};

// Parses a key = value config file. Unknown keys, malformed lines and
// constraint violations all throw ConfigError with the line or field name.
ReflexConfig load_config(const std::string& path);
ReflexConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Serializes with full precision; parse_config(save_config(c)) == c exactly.
std::string save_config(const ReflexConfig& cfg);

} // namespace rg

#endif
