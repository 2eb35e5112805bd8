#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rg/experiments.hpp"

namespace {

constexpr int kExitSuccess = 0;
constexpr int kExitTaskFailed = 1;
constexpr int kExitUsage = 2;

bool parse_csv_doubles(const std::string& s, std::vector<double>& out, size_t want) {
  out.clear();
  size_t pos = 0;
  while (pos <= s.size()) {
    size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    try {
      size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) return false;
    } catch (...) {
      return false;
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out.size() == want;
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) return false;
  f << content;
  return static_cast<bool>(f);
}

rg::ReflexConfig load_cfg_or_default(const std::string& path) {
  if (path.empty()) {
    rg::ReflexConfig cfg;
    cfg.validate();
    return cfg;
  }
  return rg::load_config(path);
}

int cmd_grasp(const std::string& config_path, const std::string& controller,
              const std::vector<std::string>& object_specs, double mass, int target_id,
              const std::string& target_spec, const std::string& place_spec, double diameter,
              uint64_t seed, bool no_noise, const std::string& log_path) {
  auto kind = rg::controller_from_name(controller);
  if (!kind) {
    std::cerr << "unknown controller '" << controller << "' (baseline|partial|full)\n";
    return kExitUsage;
  }

  rg::TrialSpec spec;
  spec.controller = *kind;
  spec.seed = seed;
  spec.sensor_noise = !no_noise;
  spec.commanded_diameter = diameter;

  int next_id = 1;
  for (const std::string& os : object_specs) {
    std::vector<double> v;
    if (!parse_csv_doubles(os, v, 4)) {
      v.clear();
      if (!parse_csv_doubles(os, v, 3)) {
        std::cerr << "bad --object '" << os << "', expected x,y,radius[,mass]\n";
        return kExitUsage;
      }
    }
    rg::DiskObject obj;
    obj.id = next_id++;
    obj.center = {v[0], v[1]};
    obj.radius = v[2];
    obj.mass = v.size() == 4 ? v[3] : mass;
    obj.label = "disk";
    if (obj.radius <= 0.0 || obj.mass <= 0.0) {
      std::cerr << "object radius and mass must be > 0\n";
      return kExitUsage;
    }
    spec.objects.push_back(obj);
  }
  if (!spec.objects.empty()) {
    spec.target_object_id = target_id > 0 ? target_id : 1;
    if (spec.target_object_id > static_cast<int>(spec.objects.size())) {
      std::cerr << "--target-id past the last object\n";
      return kExitUsage;
    }
  }

  std::vector<double> v;
  if (!parse_csv_doubles(target_spec, v, 2)) {
    std::cerr << "bad --target '" << target_spec << "', expected x,y\n";
    return kExitUsage;
  }
  spec.commanded_target = {v[0], v[1]};
  if (!place_spec.empty()) {
    if (!parse_csv_doubles(place_spec, v, 2)) {
      std::cerr << "bad --place '" << place_spec << "', expected x,y\n";
      return kExitUsage;
    }
    spec.place_base_target = rg::PlanarVec{v[0], v[1]};
  }

  rg::ReflexConfig cfg = load_cfg_or_default(config_path);
  rg::EventLog log;
  rg::TrialRecord rec = rg::run_trial(spec, cfg, log_path.empty() ? nullptr : &log);

  if (!log_path.empty() && !write_file(log_path, log.csv())) {
    std::cerr << "cannot write log file " << log_path << "\n";
    return kExitUsage;
  }

  std::cout << rg::trial_csv_header() << rg::trial_csv_row(rec);
  return rec.succeeded ? kExitSuccess : kExitTaskFailed;
}

int cmd_sweep(const std::string& config_path, double pitch, double extent_x, double extent_y,
              const std::string& controllers, int jobs, uint64_t seed, bool no_noise,
              const std::string& out_dir, bool svg) {
  rg::GridSweepSpec spec;
  spec.pitch = pitch;
  spec.extent_x = extent_x;
  spec.extent_y = extent_y;
  spec.jobs = jobs;
  spec.seed = seed;
  spec.sensor_noise = !no_noise;

  spec.controllers.clear();
  size_t pos = 0;
  while (pos <= controllers.size()) {
    size_t comma = controllers.find(',', pos);
    std::string name =
        controllers.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    auto kind = rg::controller_from_name(name);
    if (!kind) {
      std::cerr << "unknown controller '" << name << "' in --controllers\n";
      return kExitUsage;
    }
    spec.controllers.push_back(*kind);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  rg::ReflexConfig cfg = load_cfg_or_default(config_path);
  rg::GridSweepResult res = rg::run_grid_sweep(spec, cfg);

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (!write_file(dir / "grid.csv", rg::grid_csv(res)) ||
      !write_file(dir / "trials.csv", rg::grid_trials_csv(res)) ||
      !write_file(dir / "summary.txt", rg::grid_summary(res)) ||
      (svg && !write_file(dir / "sweep.svg", rg::grid_svg(res)))) {
    std::cerr << "cannot write outputs under " << dir << "\n";
    return kExitUsage;
  }
  std::cout << rg::grid_summary(res);
  return kExitSuccess;
}

int cmd_clutter(const std::string& config_path, int episodes, int objects, double noise,
                uint64_t seed, int jobs, bool no_noise, const std::string& out_dir) {
  rg::ClutterSpec spec;
  spec.episodes = episodes;
  spec.objects_per_episode = objects;
  spec.noise_sigma = noise;
  spec.seed = seed;
  spec.jobs = jobs;
  spec.sensor_noise = !no_noise;

  rg::ReflexConfig cfg = load_cfg_or_default(config_path);
  rg::ClutterResult res = rg::run_clutter(spec, cfg);

  std::filesystem::path dir(out_dir);
  std::filesystem::create_directories(dir);
  if (!write_file(dir / "picks.csv", rg::clutter_csv(res)) ||
      !write_file(dir / "classes.csv", rg::clutter_class_csv(res)) ||
      !write_file(dir / "summary.txt", rg::clutter_summary(res))) {
    std::cerr << "cannot write outputs under " << dir << "\n";
    return kExitUsage;
  }
  std::cout << rg::clutter_summary(res);
  return kExitSuccess;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"planar reflexive grasping simulator"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "key=value config file")
      ->envname("REFLEX_CONFIG")
      ->check(CLI::ExistingFile);

  auto* grasp = app.add_subcommand("grasp", "run one pick-and-place trial");
  std::string controller = "full";
  std::vector<std::string> objects;
  double mass = 0.2;
  std::string target = "0.30,0";
  std::string place;
  double diameter = 0.065;
  uint64_t seed = 1;
  bool no_noise = false;
  std::string log_path;
  grasp->add_option("--controller", controller, "baseline|partial|full");
  grasp->add_option("--object", objects, "object as x,y,radius[,mass] (repeatable)");
  grasp->add_option("--mass", mass, "default object mass (kg)")->check(CLI::PositiveNumber);
  int target_id = 0;
  grasp->add_option("--target-id", target_id, "grasp this object (1-based, default first)");
  grasp->add_option("--target", target, "commanded grasp point as x,y");
  grasp->add_option("--place", place, "base placement goal as x,y");
  grasp->add_option("--diameter", diameter, "object diameter told to the baseline (m)");
  grasp->add_option("--seed", seed, "trial RNG seed");
  grasp->add_flag("--no-noise", no_noise, "disable sensor noise");
  grasp->add_option("--log", log_path, "write a per-tick event log CSV");

  auto* sweep = app.add_subcommand("sweep", "grid characterization of the success set");
  double pitch = 0.025, extent_x = 0.100, extent_y = 0.0875;
  std::string controllers = "baseline,partial,full";
  int jobs = 1;
  uint64_t sweep_seed = 1;
  bool sweep_no_noise = false;
  std::string sweep_out = "sweep_out";
  bool svg = false;
  sweep->add_option("--pitch", pitch, "grid pitch (m)")->check(CLI::PositiveNumber);
  sweep->add_option("--extent-x", extent_x, "max |dx| (m)")->check(CLI::NonNegativeNumber);
  sweep->add_option("--extent-y", extent_y, "max |dy| (m)")->check(CLI::NonNegativeNumber);
  sweep->add_option("--controllers", controllers, "comma list of controllers to sweep");
  sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sweep_seed, "sweep RNG seed");
  sweep->add_flag("--no-noise", sweep_no_noise, "disable sensor noise");
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_flag("--svg", svg, "also render the success sets as SVG");

  auto* clutter = app.add_subcommand("clutter", "shelf clearing success rates");
  int episodes = 25, cl_objects = 5;
  double noise = 0.010;
  uint64_t cl_seed = 2;
  int cl_jobs = 1;
  bool cl_no_noise = false;
  std::string cl_out = "clutter_out";
  clutter->add_option("--episodes", episodes, "number of episodes")
      ->check(CLI::NonNegativeNumber);
  clutter->add_option("--objects", cl_objects, "objects per episode")
      ->check(CLI::NonNegativeNumber);
  clutter->add_option("--noise", noise, "scan point noise sigma (m)")
      ->check(CLI::NonNegativeNumber);
  clutter->add_option("--seed", cl_seed, "experiment RNG seed");
  clutter->add_option("--jobs", cl_jobs, "worker threads")->check(CLI::PositiveNumber);
  clutter->add_flag("--no-noise", cl_no_noise, "disable contact sensor noise");
  clutter->add_option("--out", cl_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  try {
    if (grasp->parsed())
      return cmd_grasp(config_path, controller, objects, mass, target_id, target, place, diameter,
                       seed,
                       no_noise, log_path);
    if (sweep->parsed())
      return cmd_sweep(config_path, pitch, extent_x, extent_y, controllers, jobs, sweep_seed,
                       sweep_no_noise, sweep_out, svg);
    if (clutter->parsed())
      return cmd_clutter(config_path, episodes, cl_objects, noise, cl_seed, cl_jobs, cl_no_noise,
                         cl_out);
  } catch (const rg::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
