#include "seagrasp/sweep.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace sg {

namespace {

const std::array<ObjectShape, 4> kSweepObjects = {
    make_circle(0.067), make_box(0.057), make_circle(0.047), make_box(0.039)};
const std::array<double, 3> kSweepHeights = {0.100, 0.120, 0.140};
const std::array<double, 3> kSweepPoses = {0.0, deg_to_rad(30.0), deg_to_rad(60.0)};
const std::array<const char*, 2> kSweepFrictions = {"rubber", "vinyl"};
const std::array<double, 3> kBaselineRatios = {0.3, 0.4, 0.5};

TrialSpec base_spec(const ObjectShape& obj, double height, const char* friction,
                    uint64_t seed) {
  TrialSpec s;
  s.object = obj;
  s.location = Vec2{0.0, height};
  s.friction_label = friction;
  s.mu = friction_mu(friction);
  s.seed = seed;
  return s;
}

}  // namespace

std::vector<TrialSpec> default_sweep(uint64_t base_seed) {
  std::vector<TrialSpec> out;
  out.reserve(360);
  uint64_t seed = base_seed;

  struct FourSea {
    ControllerKind kind;
    double ratio;
  };
  const std::array<FourSea, 4> controllers = {{{ControllerKind::Mimo, 0.5},
                                               {ControllerKind::FixedRatio, 0.3},
                                               {ControllerKind::FixedRatio, 0.4},
                                               {ControllerKind::FixedRatio, 0.5}}};
  for (const FourSea& c : controllers) {
    for (const ObjectShape& obj : kSweepObjects) {
      for (double h : kSweepHeights) {
        for (double pose : kSweepPoses) {
          for (const char* fric : kSweepFrictions) {
            TrialSpec s = base_spec(obj, h, fric, seed++);
            s.controller = c.kind;
            s.ratio = c.ratio;
            s.initial_pose = pose;
            out.push_back(s);
          }
        }
      }
    }
  }
  for (double ratio : kBaselineRatios) {
    for (const ObjectShape& obj : kSweepObjects) {
      for (double h : kSweepHeights) {
        for (const char* fric : kSweepFrictions) {
          TrialSpec s = base_spec(obj, h, fric, seed++);
          s.controller = ControllerKind::PhysUA;
          s.ratio = ratio;
          out.push_back(s);
        }
      }
    }
  }
  return out;
}

std::vector<TrialSpec> enveloping_suite(uint64_t base_seed) {
  std::vector<TrialSpec> out;
  out.reserve(8);
  uint64_t seed = base_seed;
  struct FourSea {
    ControllerKind kind;
    double ratio;
  };
  const std::array<FourSea, 2> controllers = {
      {{ControllerKind::Mimo, 0.5}, {ControllerKind::FixedRatio, 0.5}}};
  const std::array<ObjectShape, 2> objects = {make_circle(0.067), make_box(0.057)};
  for (const FourSea& c : controllers) {
    for (const ObjectShape& obj : objects) {
      for (double h : {0.060, 0.080}) {
        TrialSpec s = base_spec(obj, h, "rubber", seed++);
        s.controller = c.kind;
        s.ratio = c.ratio;
        s.initial_pose = 0.0;
        out.push_back(s);
      }
    }
  }
  return out;
}

std::vector<TrialSpec> transition_suite(uint64_t base_seed) {
  std::vector<TrialSpec> out;
  out.reserve(18);
  uint64_t seed = base_seed;
  const std::array<ObjectShape, 2> objects = {make_circle(0.067), make_box(0.057)};
  for (const ObjectShape& obj : objects) {
    for (double h : kSweepHeights) {
      for (double pose : kSweepPoses) {
        TrialSpec s = base_spec(obj, h, "vinyl", seed++);
        s.controller = ControllerKind::Transition;
        s.initial_pose = pose;
        out.push_back(s);
      }
    }
  }
  return out;
}

void OutcomeCounts::add(const TrialResult& r) {
  ++trials;
  if (r.diverged) ++diverged;
  switch (r.outcome) {
    case Outcome::FingertipStable: ++fingertip; break;
    case Outcome::Enveloped: ++enveloped; break;
    case Outcome::JointLimited: ++joint_limited; break;
    case Outcome::Ejected: ++ejected; break;
    case Outcome::Timeout: ++timeout; break;
  }
}

std::vector<DimensionValue> trial_dimensions(const TrialSpec& spec) {
  std::vector<DimensionValue> dims;
  dims.push_back({"overall", "all"});
  dims.push_back({"object", shape_label(spec.object)});
  dims.push_back({"location", std::to_string(std::lround(spec.location.y * 1000.0))});
  if (spec.initial_pose.has_value()) {
    dims.push_back({"initial_pose", std::to_string(std::lround(rad_to_deg(*spec.initial_pose)))});
  }
  dims.push_back({"friction", spec.friction_label});
  return dims;
}

int SweepReport::diverged_count() const {
  int n = 0;
  for (const TrialResult& r : results) n += r.diverged ? 1 : 0;
  return n;
}

void aggregate(SweepReport& rep) {
  rep.by_controller.clear();
  rep.cells.clear();
  rep.mean_pose_change.clear();
  std::map<std::string, std::pair<double, int>> pose_acc;

  for (size_t i = 0; i < rep.results.size(); ++i) {
    const TrialSpec& spec = rep.specs[i];
    const TrialResult& r = rep.results[i];
    const std::string label = controller_label(spec);
    rep.by_controller[label].add(r);
    for (const DimensionValue& d : trial_dimensions(spec)) {
      rep.cells[label][d.dimension][d.value].add(r);
    }
    if (r.success && std::isfinite(r.pose_change_deg)) {
      auto& [sum, n] = pose_acc[label];
      sum += r.pose_change_deg;
      ++n;
    }
  }
  for (const auto& [label, acc] : pose_acc) {
    rep.mean_pose_change[label] = acc.first / acc.second;
  }
}

SweepReport run_suite(const std::vector<TrialSpec>& specs, const TrialParams& params,
                      int jobs) {
  SweepReport rep;
  rep.specs = specs;
  rep.results.resize(specs.size());

  auto run_one = [&](size_t i) {
    try {
      rep.results[i] = run_trial(specs[i], params);
    } catch (const std::exception&) {
      TrialResult r;
      r.diverged = true;
      r.outcome = Outcome::Timeout;
      r.pose_change_deg = std::numeric_limits<double>::quiet_NaN();
      rep.results[i] = r;
    }
  };

  if (jobs <= 1) {
    for (size_t i = 0; i < specs.size(); ++i) run_one(i);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= specs.size()) return;
        run_one(i);
      }
    };
    std::vector<std::thread> pool;
    const int n = std::min<int>(jobs, static_cast<int>(specs.size()));
    pool.reserve(static_cast<size_t>(n));
    for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  aggregate(rep);
  return rep;
}

}  // namespace sg
