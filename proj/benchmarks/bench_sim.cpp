#include <benchmark/benchmark.h>

#include "rg/experiments.hpp"
#include "rg/reflex.hpp"
#include "rg/trial.hpp"

namespace {

rg::WorldState nominal_world() {
  rg::HandGeometry geo;
  rg::WorldState w;
  w.base = rg::GripperFrame{{0.0, 0.0}, 0.0};
  w.left = rg::make_finger(geo, rg::FingerSide::left);
  w.right = rg::make_finger(geo, rg::FingerSide::right);
  rg::DiskObject obj;
  obj.id = 1;
  obj.center = {0.15, 0.0};
  obj.radius = 0.0325;
  w.objects.push_back({obj, {}});
  return w;
}

void BM_physics_step(benchmark::State& state) {
  rg::WorldState w = nominal_world();
  rg::JointVec tau{0.1, 0.05, 0.02};
  for (auto _ : state) {
    rg::step(w, tau, tau, w.params.dt);
    benchmark::DoNotOptimize(w.time);
  }
}
BENCHMARK(BM_physics_step);

void BM_proximity_sample(benchmark::State& state) {
  rg::WorldState w = nominal_world();
  std::vector<rg::DiskObject> disks = {w.objects[0].disk};
  for (auto _ : state) {
    auto d = rg::sample_proximity(w.left, w.right, w.params.tip_radius, w.params.palm_radius,
                                  disks);
    benchmark::DoNotOptimize(d);
  }
}
BENCHMARK(BM_proximity_sample);

void BM_controller_tick(benchmark::State& state) {
  rg::ReflexConfig cfg;
  rg::HandGeometry geo;
  rg::ReflexController ctl(cfg, rg::ReflexOptions{}, geo, 4.0 / 1200.0);
  rg::SensorSnapshot snap;
  snap.tip_left = rg::forward_kinematics(rg::make_finger(geo, rg::FingerSide::left));
  snap.tip_right = rg::forward_kinematics(rg::make_finger(geo, rg::FingerSide::right));
  for (auto _ : state) {
    snap.time += 4.0 / 1200.0;
    auto dec = ctl.tick(snap);
    benchmark::DoNotOptimize(dec);
  }
}
BENCHMARK(BM_controller_tick);

void BM_full_trial(benchmark::State& state) {
  rg::TrialSpec spec;
  rg::DiskObject obj;
  obj.id = 1;
  obj.center = {0.30, 0.0};
  obj.radius = 0.0325;
  obj.label = "disk";
  spec.objects = {obj};
  spec.target_object_id = 1;
  rg::ReflexConfig cfg;
  for (auto _ : state) {
    auto rec = rg::run_trial(spec, cfg);
    benchmark::DoNotOptimize(rec);
  }
}
BENCHMARK(BM_full_trial)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
