#include "rg/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <thread>

#include "rg/perception.hpp"

namespace rg {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int clamp_jobs(int jobs, size_t tasks) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int j = jobs < 1 ? 1 : jobs;
  j = std::min<int>(j, static_cast<int>(hw) * 2);
  j = std::min<int>(j, static_cast<int>(tasks));
  return std::max(j, 1);
}

// Runs fn(i) for i in [0, n) on `jobs` workers. Work is claimed by index, so
// results keyed by i are identical however many workers run.
template <typename Fn>
void parallel_for(size_t n, int jobs, Fn&& fn) {
  if (n == 0) return;
  jobs = clamp_jobs(jobs, n);
  if (jobs == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= n) return;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

std::vector<double> grid_axis(double extent, double pitch) {
  std::vector<double> v;
  for (double d = -extent; d <= extent + 1e-9; d += pitch) v.push_back(d);
  return v;
}

} // namespace

int GridSweepResult::success_count(ControllerKind k) const {
  int n = 0;
  for (const GridCell& c : cells)
    if (c.controller == k && c.record.succeeded) ++n;
  return n;
}

double GridSweepResult::area_mm2(ControllerKind k) const {
  double cell_mm2 = pitch * 1000.0 * pitch * 1000.0;
  return success_count(k) * cell_mm2;
}

const GridCell* GridSweepResult::cell_at(ControllerKind k, int ix, int iy) const {
  for (const GridCell& c : cells)
    if (c.controller == k && c.ix == ix && c.iy == iy) return &c;
  return nullptr;
}

GridSweepResult run_grid_sweep(const GridSweepSpec& spec, const ReflexConfig& cfg) {
  if (spec.pitch <= 0.0) throw std::invalid_argument("grid sweep: pitch must be > 0");
  cfg.validate();

  auto xs = grid_axis(spec.extent_x, spec.pitch);
  auto ys = grid_axis(spec.extent_y, spec.pitch);

  GridSweepResult res;
  res.pitch = spec.pitch;
  res.nx = static_cast<int>(xs.size());
  res.ny = static_cast<int>(ys.size());
  res.controllers = spec.controllers;

  size_t cells_per_ctrl = xs.size() * ys.size();
  size_t total = cells_per_ctrl * spec.controllers.size();
  res.cells.resize(total);

  auto t0 = Clock::now();

  auto make_spec = [&](ControllerKind k, double dx, double dy, uint64_t salt) {
    TrialSpec ts;
    ts.controller = k;
    DiskObject obj;
    obj.id = 1;
    obj.center = spec.nominal_target + PlanarVec{dx, dy};
    obj.radius = spec.object_radius;
    obj.mass = spec.object_mass;
    obj.label = "disk";
    ts.objects = {obj};
    ts.target_object_id = 1;
    ts.commanded_target = spec.nominal_target;
    ts.commanded_diameter = 2.0 * spec.object_radius;
    ts.seed = mix_seed(spec.seed, salt);
    ts.sensor_noise = spec.sensor_noise;
    ts.sim = spec.sim;
    return ts;
  };

  parallel_for(total, spec.jobs, [&](size_t i) {
    size_t ci = i / cells_per_ctrl;
    size_t cell = i % cells_per_ctrl;
    int iy = static_cast<int>(cell / xs.size());
    int ix = static_cast<int>(cell % xs.size());
    GridCell& out = res.cells[i];
    out.controller = spec.controllers[ci];
    out.ix = ix;
    out.iy = iy;
    out.dx = xs[ix];
    out.dy = ys[iy];
    out.record = run_trial(make_spec(out.controller, out.dx, out.dy, i + 1), cfg);
  });

  res.wall_seconds = seconds_since(t0);
  for (const GridCell& c : res.cells) res.sim_seconds += c.record.sim_time;

  // Single-thread throughput probe on the nominal scene.
  {
    TrialSpec probe = make_spec(ControllerKind::full_reflex, 0.0, 0.0, total + 1);
    auto p0 = Clock::now();
    TrialRecord r = run_trial(probe, cfg);
    double wall = seconds_since(p0);
    res.realtime_factor = wall > 0.0 ? r.sim_time / wall : 0.0;
  }
  return res;
}

std::string grid_csv(const GridSweepResult& r) {
  std::string out = "controller,ix,iy,dx_mm,dy_mm,outcome,pick_time,place_time,regrasps,seed\n";
  char line[256];
  for (const GridCell& c : r.cells) {
    std::snprintf(line, sizeof line, "%s,%d,%d,%.3f,%.3f,%s,%.6f,%.6f,%d,%llu\n",
                  controller_name(c.controller), c.ix, c.iy, c.dx * 1000.0, c.dy * 1000.0,
                  c.record.succeeded ? "SUCCEEDED"
                  : c.record.dropped_in_transport ? "DROPPED"
                                                  : "FAILED",
                  c.record.pick_time, c.record.place_time, c.record.regrasp_count,
                  static_cast<unsigned long long>(c.record.seed));
    out += line;
  }
  return out;
}

std::string grid_trials_csv(const GridSweepResult& r) {
  std::string out = trial_csv_header();
  for (const GridCell& c : r.cells) out += trial_csv_row(c.record);
  return out;
}

std::string grid_summary(const GridSweepResult& r) {
  // Reference areas from the hardware study this setup mirrors; ordering and
  // coarse ratio are the comparable quantities, not the absolute values.
  const double ref_baseline = 11250.0, ref_partial = 14530.0, ref_full = 17500.0;

  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof buf, "grid sweep: %dx%d cells, pitch %.1f mm\n", r.nx, r.ny,
                r.pitch * 1000.0);
  out += buf;
  for (ControllerKind k : r.controllers) {
    std::snprintf(buf, sizeof buf, "  %-8s  %3d/%d cells  area %8.1f mm^2\n", controller_name(k),
                  r.success_count(k), r.nx * r.ny, r.area_mm2(k));
    out += buf;
  }
  double ab = r.area_mm2(ControllerKind::baseline);
  double ap = r.area_mm2(ControllerKind::partial_reflex);
  double af = r.area_mm2(ControllerKind::full_reflex);
  if (ab > 0.0) {
    std::snprintf(buf, sizeof buf, "ratios vs baseline: partial %+.1f%%, full %+.1f%%\n",
                  (ap / ab - 1.0) * 100.0, (af / ab - 1.0) * 100.0);
    out += buf;
  }
  std::snprintf(buf, sizeof buf,
                "reference areas (hardware study): baseline %.0f, partial %.0f, full %.0f mm^2 "
                "(+%.1f%% / +%.1f%%); absolute values are not expected to match\n",
                ref_baseline, ref_partial, ref_full, (ref_partial / ref_baseline - 1.0) * 100.0,
                (ref_full / ref_baseline - 1.0) * 100.0);
  out += buf;
  std::snprintf(buf, sizeof buf, "sim time %.1f s, wall %.2f s, aggregate %.0fx real time\n",
                r.sim_seconds, r.wall_seconds,
                r.wall_seconds > 0.0 ? r.sim_seconds / r.wall_seconds : 0.0);
  out += buf;
  std::snprintf(buf, sizeof buf, "single-thread probe: %.0fx real time\n", r.realtime_factor);
  out += buf;
  return out;
}

std::string grid_svg(const GridSweepResult& r) {
  const int cell = 26, gap = 40, top = 52, left = 46, bottom = 34;
  int panel_w = r.nx * cell;
  int panel_h = r.ny * cell;
  int w = left + static_cast<int>(r.controllers.size()) * (panel_w + gap) - gap + 16;
  int h = top + panel_h + bottom;

  char buf[512];
  std::string svg;
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\" font-family=\"sans-serif\">\n",
                w, h, w, h);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (size_t ci = 0; ci < r.controllers.size(); ++ci) {
    ControllerKind k = r.controllers[ci];
    int px = left + static_cast<int>(ci) * (panel_w + gap);
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"14\">%s: %.0f mm^2</text>\n",
                  px, top - 12, controller_name(k), r.area_mm2(k));
    svg += buf;
    for (int iy = 0; iy < r.ny; ++iy) {
      for (int ix = 0; ix < r.nx; ++ix) {
        const GridCell* c = r.cell_at(k, ix, iy);
        const char* fill = c && c->record.succeeded ? "#4c9a5f" : "#e6e2da";
        // y axis points up in the scene, down in SVG
        int x = px + ix * cell;
        int y = top + (r.ny - 1 - iy) * cell;
        std::snprintf(buf, sizeof buf,
                      "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"%s\" "
                      "stroke=\"#ffffff\" stroke-width=\"1\"/>\n",
                      x, y, cell, cell, fill);
        svg += buf;
      }
    }
    std::snprintf(buf, sizeof buf,
                  "<rect x=\"%d\" y=\"%d\" width=\"%d\" height=\"%d\" fill=\"none\" "
                  "stroke=\"#444444\"/>\n",
                  px, top, panel_w, panel_h);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%d\" y=\"%d\" font-size=\"11\" fill=\"#444444\">dx right, dy "
                  "up</text>\n",
                  px, top + panel_h + 16);
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

namespace {

struct ObjectClass {
  const char* label;
  double radius;
  double mass;
};

constexpr ObjectClass kClasses[] = {
    {"cup", 0.0325, 0.25}, {"apple", 0.035, 0.18}, {"can", 0.030, 0.37},
    {"coffee", 0.025, 0.31}, {"bowl", 0.045, 0.15},
};

// Rejection-samples a non-overlapping shelf scene; empty on failure.
std::vector<DiskObject> sample_scene(const ClutterSpec& spec, std::mt19937_64& rng) {
  std::vector<DiskObject> scene;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < spec.objects_per_episode; ++i) {
    const ObjectClass& cls = kClasses[rng() % std::size(kClasses)];
    DiskObject obj;
    obj.id = i + 1;
    obj.radius = cls.radius;
    obj.mass = cls.mass;
    obj.label = cls.label;
    double x_lo = spec.shelf_x_min + obj.radius, x_hi = spec.shelf_x_max - obj.radius;
    double y_lo = spec.shelf_y_min + obj.radius, y_hi = spec.shelf_y_max - obj.radius;
    bool placed = false;
    for (int attempt = 0; attempt < 1000 && !placed; ++attempt) {
      PlanarVec c{x_lo + unit(rng) * (x_hi - x_lo), y_lo + unit(rng) * (y_hi - y_lo)};
      placed = true;
      for (const DiskObject& other : scene) {
        if (norm(c - other.center) < obj.radius + other.radius + spec.spacing_margin) {
          placed = false;
          break;
        }
      }
      if (placed) obj.center = c;
    }
    if (!placed) return {};
    scene.push_back(obj);
  }
  return scene;
}

struct EpisodeResult {
  std::vector<PickRecord> picks;
  std::vector<std::string> warnings;
};

EpisodeResult run_episode(const ClutterSpec& spec, const ReflexConfig& cfg, int ep) {
  EpisodeResult out;
  uint64_t ep_seed = mix_seed(spec.seed, 7001 + static_cast<uint64_t>(ep));
  std::mt19937_64 rng(ep_seed);

  std::vector<DiskObject> scene = sample_scene(spec, rng);
  if (scene.empty() && spec.objects_per_episode > 0) {
    char msg[96];
    std::snprintf(msg, sizeof msg, "episode %d: unplaceable scene, skipped", ep);
    out.warnings.push_back(msg);
    return out;
  }

  CameraPose camera{PlanarVec{0.0, 0.0}};
  std::vector<int> attempted;
  auto was_attempted = [&](int id) {
    return std::find(attempted.begin(), attempted.end(), id) != attempted.end();
  };

  for (int pick = 0; pick < spec.objects_per_episode; ++pick) {
    if (std::getenv("RG_DEBUG_SCENE")) {
      for (const DiskObject& o : scene)
        std::fprintf(stderr, "ep %d pick %d obj id=%d %s x=%.6f y=%.6f r=%.4f m=%.3f\n", ep, pick,
                     o.id, o.label.c_str(), o.center.x, o.center.y, o.radius, o.mass);
    }
    // candidates by camera distance
    std::vector<const DiskObject*> cand;
    for (const DiskObject& o : scene)
      if (!was_attempted(o.id)) cand.push_back(&o);
    if (cand.empty()) break;
    std::sort(cand.begin(), cand.end(), [&](const DiskObject* a, const DiskObject* b) {
      double da = norm(a->center - camera.origin), db = norm(b->center - camera.origin);
      if (da != db) return da < db;
      return a->id < b->id;
    });

    const DiskObject* target = nullptr;
    PlanarVec est;
    bool have_est = false;
    for (const DiskObject* o : cand) {
      std::vector<DiskObject> others;
      for (const DiskObject& s : scene)
        if (s.id != o->id) others.push_back(s);
      try {
        SyntheticScan scan =
            synth_scan(*o, others, camera, spec.scan_points, spec.noise_sigma, rng);
        est = extract_target(scan);
        target = o;
        have_est = true;
        break;
      } catch (const OccludedObject&) {
        continue;
      } catch (const InsufficientData&) {
        continue;
      }
    }
    if (!target) {
      // everything occluded; grab the nearest blind rather than stalling
      target = cand.front();
      est = target->center;
    }

    PickRecord pr;
    pr.episode = ep;
    pr.pick = pick;
    pr.true_center = target->center;
    pr.est_center = est;

    TrialSpec ts;
    ts.objects = scene;
    ts.target_object_id = target->id;
    ts.commanded_target = est;
    ts.commanded_diameter = 2.0 * target->radius;
    ts.seed = mix_seed(ep_seed, 101 + static_cast<uint64_t>(pick));
    ts.sensor_noise = spec.sensor_noise;
    ts.sim = spec.sim;

    ts.controller = ControllerKind::full_reflex;
    pr.full = run_trial(ts, cfg);

    ts.controller = ControllerKind::baseline;
    pr.baseline = run_trial(ts, cfg);

    attempted.push_back(target->id);
    // scene evolves with the primary controller's outcome
    scene = pr.full.final_objects;
    (void)have_est;
    out.picks.push_back(std::move(pr));
  }
  return out;
}

} // namespace

std::vector<ClassRate> clutter_class_rates(const ClutterResult& r) {
  std::map<std::string, ClassRate> by_label;
  for (const PickRecord& p : r.picks) {
    ClassRate& cr = by_label[p.full.label];
    cr.label = p.full.label;
    cr.trials += 1;
    cr.full_successes += p.full.succeeded ? 1 : 0;
    cr.baseline_successes += p.baseline.succeeded ? 1 : 0;
  }
  std::vector<ClassRate> out;
  for (auto& [label, cr] : by_label) out.push_back(cr);
  return out;
}

ClutterResult run_clutter(const ClutterSpec& spec, const ReflexConfig& cfg) {
  if (spec.episodes < 0 || spec.objects_per_episode < 0)
    throw std::invalid_argument("clutter: episodes and objects must be >= 0");
  if (spec.noise_sigma < 0.0) throw std::invalid_argument("clutter: noise_sigma must be >= 0");
  cfg.validate();

  ClutterResult res;
  res.spec = spec;

  auto t0 = Clock::now();
  std::vector<EpisodeResult> episodes(spec.episodes);
  parallel_for(static_cast<size_t>(spec.episodes), spec.jobs,
               [&](size_t ep) { episodes[ep] = run_episode(spec, cfg, static_cast<int>(ep)); });

  for (EpisodeResult& er : episodes) {
    for (PickRecord& p : er.picks) res.picks.push_back(std::move(p));
    for (std::string& w : er.warnings) res.warnings.push_back(std::move(w));
  }
  res.wall_seconds = seconds_since(t0);
  for (const PickRecord& p : res.picks)
    res.sim_seconds += p.full.sim_time + p.baseline.sim_time;
  return res;
}

std::string clutter_csv(const ClutterResult& r) {
  std::string out =
      "episode,pick,label,object_id,true_x,true_y,radius,est_x,est_y,"
      "full_outcome,full_pick_time,full_place_time,full_regrasps,"
      "base_outcome,base_pick_time,base_place_time,seed\n";
  char line[512];
  for (const PickRecord& p : r.picks) {
    auto outcome = [](const TrialRecord& t) {
      return t.succeeded ? "SUCCEEDED" : t.dropped_in_transport ? "DROPPED" : "FAILED";
    };
    std::snprintf(line, sizeof line,
                  "%d,%d,%s,%d,%.6f,%.6f,%.6f,%.6f,%.6f,%s,%.6f,%.6f,%d,%s,%.6f,%.6f,%llu\n",
                  p.episode, p.pick, p.full.label.c_str(), p.full.target_object_id,
                  p.true_center.x, p.true_center.y, p.full.obj_r, p.est_center.x, p.est_center.y,
                  outcome(p.full), p.full.pick_time, p.full.place_time, p.full.regrasp_count,
                  outcome(p.baseline), p.baseline.pick_time, p.baseline.place_time,
                  static_cast<unsigned long long>(p.full.seed));
    out += line;
  }
  return out;
}

std::string clutter_class_csv(const ClutterResult& r) {
  std::string out = "label,trials,full_successes,full_rate,baseline_successes,baseline_rate\n";
  char line[256];
  for (const ClassRate& cr : clutter_class_rates(r)) {
    std::snprintf(line, sizeof line, "%s,%d,%d,%.4f,%d,%.4f\n", cr.label.c_str(), cr.trials,
                  cr.full_successes, cr.trials ? double(cr.full_successes) / cr.trials : 0.0,
                  cr.baseline_successes,
                  cr.trials ? double(cr.baseline_successes) / cr.trials : 0.0);
    out += line;
  }
  return out;
}

std::string clutter_summary(const ClutterResult& r) {
  int total = static_cast<int>(r.picks.size());
  int full_ok = 0, base_ok = 0;
  double pick_sum = 0.0, place_sum = 0.0;
  int timed = 0;
  for (const PickRecord& p : r.picks) {
    full_ok += p.full.succeeded ? 1 : 0;
    base_ok += p.baseline.succeeded ? 1 : 0;
    if (p.full.succeeded) {
      pick_sum += p.full.pick_time;
      place_sum += p.full.place_time;
      ++timed;
    }
  }
  char buf[384];
  std::string out;
  std::snprintf(buf, sizeof buf, "clutter: %d episodes, %d picks\n", r.spec.episodes, total);
  out += buf;
  if (total > 0) {
    std::snprintf(buf, sizeof buf, "  full     %3d/%d  (%.1f%%)\n", full_ok, total,
                  100.0 * full_ok / total);
    out += buf;
    std::snprintf(buf, sizeof buf, "  baseline %3d/%d  (%.1f%%)\n", base_ok, total,
                  100.0 * base_ok / total);
    out += buf;
  }
  if (timed > 0) {
    std::snprintf(buf, sizeof buf,
                  "mean over successful picks: grasp %.2f s, place %.2f s, total %.2f s\n",
                  pick_sum / timed, place_sum / timed, (pick_sum + place_sum) / timed);
    out += buf;
  }
  out += clutter_class_csv(r);
  for (const std::string& w : r.warnings) out += "warning: " + w + "\n";
  std::snprintf(buf, sizeof buf, "sim time %.1f s, wall %.2f s\n", r.sim_seconds, r.wall_seconds);
  out += buf;
  return out;
}

} // namespace rg
