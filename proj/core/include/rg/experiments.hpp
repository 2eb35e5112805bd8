#ifndef RG_EXPERIMENTS_HPP
#define RG_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "rg/trial.hpp"

namespace rg {

struct GridSweepSpec {
  double pitch = 0.025; // m
  double extent_x = 0.100;
  double extent_y = 0.0875;
  PlanarVec nominal_target{0.30, 0.0};
  double object_radius = 0.0325;
  double object_mass = 0.2;
  std::vector<ControllerKind> controllers = {ControllerKind::baseline,
                                             ControllerKind::partial_reflex,
                                             ControllerKind::full_reflex};
  int jobs = 1;
  uint64_t seed = 1;
  bool sensor_noise = true;
  SimParams sim;
};

struct GridCell {
  ControllerKind controller = ControllerKind::full_reflex;
  int ix = 0, iy = 0;
  double dx = 0.0, dy = 0.0; // displacement from nominal (m)
  TrialRecord record;
};

struct GridSweepResult {
  double pitch = 0.0;
  int nx = 0, ny = 0;
  std::vector<ControllerKind> controllers;
  std::vector<GridCell> cells; // controller-major, then row-major by (iy, ix)
  double wall_seconds = 0.0;
  double sim_seconds = 0.0;
  // Single-thread stepping throughput, measured on the nominal cell.
  double realtime_factor = 0.0;

  int success_count(ControllerKind k) const;
  double area_mm2(ControllerKind k) const;
  const GridCell* cell_at(ControllerKind k, int ix, int iy) const;
};

GridSweepResult run_grid_sweep(const GridSweepSpec& spec, const ReflexConfig& cfg);

std::string grid_csv(const GridSweepResult& r);
std::string grid_trials_csv(const GridSweepResult& r);
std::string grid_summary(const GridSweepResult& r);
std::string grid_svg(const GridSweepResult& r);

struct ClutterSpec {
  int episodes = 25;
  int objects_per_episode = 5;
  double noise_sigma = 0.010; // scan point noise (m)
  int scan_points = 60;
  double shelf_x_min = 0.24, shelf_x_max = 0.50;
  double shelf_y_min = -0.20, shelf_y_max = 0.20;
  double spacing_margin = 0.015; // extra surface clearance between objects
  int jobs = 1;
  uint64_t seed = 2;
  bool sensor_noise = true;
  SimParams sim;
};

struct PickRecord {
  int episode = 0;
  int pick = 0;
  PlanarVec true_center;
  PlanarVec est_center;
  TrialRecord full;
  TrialRecord baseline; // shadow run, same scene and seed
};

struct ClutterResult {
  ClutterSpec spec;
  std::vector<PickRecord> picks; // episode-major, pick order
  std::vector<std::string> warnings;
  double wall_seconds = 0.0;
  double sim_seconds = 0.0;
};

struct ClassRate {
  std::string label;
  int trials = 0;
  int full_successes = 0;
  int baseline_successes = 0;
};

std::vector<ClassRate> clutter_class_rates(const ClutterResult& r);

ClutterResult run_clutter(const ClutterSpec& spec, const ReflexConfig& cfg);

std::string clutter_csv(const ClutterResult& r);
std::string clutter_class_csv(const ClutterResult& r);
std::string clutter_summary(const ClutterResult& r);

} // namespace rg

#endif
