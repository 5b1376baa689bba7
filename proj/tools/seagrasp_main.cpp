#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "seagrasp/config.hpp"
#include "seagrasp/results.hpp"
#include "seagrasp/sweep.hpp"

namespace {

using namespace sg;

ObjectShape parse_object(const std::string& s) {
  if (s == "circle67") return make_circle(0.067);
  if (s == "box57") return make_box(0.057);
  if (s == "circle47") return make_circle(0.047);
  if (s == "box39") return make_box(0.039);
  auto sized = [&](const char* prefix, bool circle) -> ObjectShape {
    const double mm = std::stod(s.substr(std::string(prefix).size()));
    return circle ? make_circle(mm / 1000.0) : make_box(mm / 1000.0);
  };
  try {
    if (s.rfind("circle:", 0) == 0) return sized("circle:", true);
    if (s.rfind("box:", 0) == 0) return sized("box:", false);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("unknown object '" + s + "' (try circle67, box57, circle47, box39, circle:<mm>, box:<mm>)");
}

ControllerKind parse_controller(const std::string& s) {
  if (s == "mimo") return ControllerKind::Mimo;
  if (s == "fixed-ratio") return ControllerKind::FixedRatio;
  if (s == "phys-ua") return ControllerKind::PhysUA;
  if (s == "transition") return ControllerKind::Transition;
  throw std::invalid_argument("unknown controller '" + s + "'");
}

void print_counts(const SweepReport& rep) {
  std::printf("%-12s %7s %9s %10s %13s %8s %8s %9s\n", "controller", "trials", "fingertip",
              "enveloped", "joint_limited", "ejected", "timeout", "diverged");
  for (const auto& [ctrl, c] : rep.by_controller) {
    std::printf("%-12s %7d %9d %10d %13d %8d %8d %9d\n", ctrl.c_str(), c.trials, c.fingertip,
                c.enveloped, c.joint_limited, c.ejected, c.timeout, c.diverged);
  }
  for (const auto& [ctrl, mean] : rep.mean_pose_change) {
    std::printf("%-12s mean pose change %.2f deg over successes\n", ctrl.c_str(), mean);
  }
}

SweepReport run_with_traces(const std::vector<TrialSpec>& specs, const TrialParams& params,
                            const std::string& out_dir) {
  namespace fs = std::filesystem;
  const fs::path trace_dir = fs::path(out_dir) / "traces";
  fs::create_directories(trace_dir);
  SweepReport rep;
  rep.specs = specs;
  rep.results.resize(specs.size());
  for (size_t i = 0; i < specs.size(); ++i) {
    TrialTrace trace;
    try {
      rep.results[i] = run_trial(specs[i], params, &trace);
    } catch (const std::exception&) {
      rep.results[i].diverged = true;
      rep.results[i].outcome = Outcome::Timeout;
    }
    write_text_file((trace_dir / ("trial_" + std::to_string(i) + ".json")).string(),
                    trace_json(specs[i], trace));
  }
  aggregate(rep);
  return rep;
}

int run_suite_command(const std::vector<TrialSpec>& specs, const RunConfig& cfg) {
  const SweepReport rep = cfg.trace ? run_with_traces(specs, cfg.trial, cfg.out_dir)
                                    : run_suite(specs, cfg.trial, cfg.jobs);
  write_report_files(cfg.out_dir, rep, cfg);
  print_counts(rep);
  std::printf("wrote %zu trials to %s\n", rep.results.size(), cfg.out_dir.c_str());
  return rep.diverged_count() > 0 ? 1 : 0;
}

// Repeats a suite builder `repetitions` times with disjoint seed blocks.
template <typename Builder>
std::vector<TrialSpec> repeated(Builder build, const RunConfig& cfg, uint64_t base_seed) {
  std::vector<TrialSpec> specs;
  for (int r = 0; r < cfg.repetitions; ++r) {
    std::vector<TrialSpec> block = build(base_seed + static_cast<uint64_t>(r) * 100000);
    specs.insert(specs.end(), block.begin(), block.end());
  }
  return specs;
}

int run_validate() {
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    std::printf("%s - %s\n", ok ? "ok" : "FAIL", what);
    if (!ok) ++failures;
  };

  const GainMatrices m = build_gain_matrices(GainSchedule{});
  bool gains_ok = m.kp[0][0] == 0.2 && m.kp[0][1] == 0.15 && m.kp[0][2] == 0.06 &&
                  m.kp[0][3] == 0.15 && m.kp[0][4] == 4.0 && m.kp[0][5] == 4.0 &&
                  m.kp[0][6] == 2.0 && m.kp[0][7] == 4.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = 4; j < 8; ++j) gains_ok = gains_ok && m.ki[i][j] == 0.0;
    for (int j = 0; j < 8; ++j) {
      gains_ok = gains_ok && m.feedforward[i][j] == ((i == j) ? 1.0 : 0.0);
    }
  }
  check(gains_ok, "gain matrix construction");

  {
    SeaParams p;
    p.spring_stiffness = 1.0;
    p.pulley_radius = 0.01;
    SeaState s;
    s.theta_pulley = 0.1;
    s.theta_motor = 0.0;
    check(std::abs(tendon_force(s, p).newtons - 10.0) < 1e-12, "sea tension law");
    s.mode = ControlMode::Torque;
    s.setpoint = 0.1;  // pulley torque N*m at 10 N tension
    s.theta_pulley = 0.5;
    check(std::abs(mode_step(s, p) - 0.4) < 1e-12, "sea torque-mode inversion");
  }

  {
    GripperParams gp;
    JointVector q{{deg_to_rad(30.0), deg_to_rad(60.0), deg_to_rad(30.0), deg_to_rad(60.0)}};
    const FingerPoints left = finger_points(gp, q, 0);
    const FingerPoints right = finger_points(gp, q, 1);
    const bool sym = std::abs(left.tip.x + right.tip.x) < 1e-15 &&
                     std::abs(left.tip.y - right.tip.y) < 1e-15;
    check(sym, "mirror-symmetric kinematics");
  }

  {
    // Determinism: the same spec twice gives the same trajectory hash.
    TrialParams params;
    params.timeout = 6.0;
    TrialSpec spec;
    spec.controller = ControllerKind::Mimo;
    spec.object = make_circle(0.067);
    spec.location = Vec2{0.0, 0.120};
    spec.initial_pose = deg_to_rad(30.0);
    spec.friction_label = "rubber";
    spec.mu = friction_mu("rubber");
    const TrialResult a = run_trial(spec, params);
    const TrialResult b = run_trial(spec, params);
    check(a.traj_hash == b.traj_hash && !a.diverged, "trial determinism");
  }

  std::printf(failures == 0 ? "validate: all checks passed\n"
                            : "validate: %d check(s) failed\n",
              failures);
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planar two-finger SEA gripper grasp simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int jobs = 0;
  uint64_t seed = 0;
  bool trace = false;
  app.add_option("--config", config_path, "Config file (TOML-style)");
  app.add_option("--out", out_dir, "Output directory (default from config)");
  app.add_option("--jobs", jobs, "Worker threads for suites");
  app.add_option("--seed", seed, "Base seed for per-trial seeds");
  app.add_flag("--trace", trace, "Write per-trial JSON traces");

  CLI::App* cmd_trial = app.add_subcommand("trial", "Run a single grasp trial");
  std::string controller = "mimo", object = "circle67", friction = "vinyl";
  double ratio = 0.5, location_mm = 120.0, pose_deg = 0.0, mu_override = -1.0;
  bool pose_set = false;
  cmd_trial->add_option("--controller", controller, "mimo | fixed-ratio | phys-ua | transition");
  cmd_trial->add_option("--ratio", ratio, "Distal/proximal torque ratio");
  cmd_trial->add_option("--object", object, "circle67 | box57 | circle47 | box39 | circle:<mm> | box:<mm>");
  cmd_trial->add_option("--location-mm", location_mm, "Object center height above the palm");
  cmd_trial->add_option("--pose-deg", pose_deg, "Initial distal pre-curl")
      ->trigger_on_parse()
      ->each([&](const std::string&) { pose_set = true; });
  cmd_trial->add_option("--friction", friction, "rubber | vinyl");
  cmd_trial->add_option("--mu", mu_override, "Friction coefficient override");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "Run the 360-trial grasp matrix");
  CLI::App* cmd_envelop = app.add_subcommand("envelop", "Run the 8-trial enveloping suite");
  CLI::App* cmd_transition = app.add_subcommand("transition", "Run the 18-trial transition suite");
  CLI::App* cmd_validate = app.add_subcommand("validate", "Run built-in self checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    RunConfig cfg = config_path.empty() ? default_config() : load_config(config_path);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (jobs > 0) cfg.jobs = jobs;
    if (trace) cfg.trace = true;
    cfg.trial.validate();

    if (cmd_validate->parsed()) return run_validate();

    if (cmd_sweep->parsed()) {
      return run_suite_command(repeated(default_sweep, cfg, seed), cfg);
    }
    if (cmd_envelop->parsed()) {
      return run_suite_command(repeated(enveloping_suite, cfg, seed), cfg);
    }
    if (cmd_transition->parsed()) {
      return run_suite_command(repeated(transition_suite, cfg, seed), cfg);
    }

    // Single trial.
    TrialSpec spec;
    spec.controller = parse_controller(controller);
    spec.ratio = ratio;
    spec.object = parse_object(object);
    spec.location = Vec2{0.0, location_mm / 1000.0};
    if (pose_set) spec.initial_pose = deg_to_rad(pose_deg);
    spec.friction_label = friction;
    spec.mu = mu_override >= 0.0 ? mu_override : friction_mu(friction);
    spec.seed = seed;

    TrialTrace trace_data;
    const TrialResult r = run_trial(spec, cfg.trial, cfg.trace ? &trace_data : nullptr);
    if (cfg.trace) {
      std::filesystem::create_directories(cfg.out_dir);
      const std::string path =
          (std::filesystem::path(cfg.out_dir) / ("trace_" + controller_label(spec) + ".json"))
              .string();
      write_text_file(path, trace_json(spec, trace_data));
      std::printf("trace: %s\n", path.c_str());
    }
    std::printf("outcome: %s%s\n", outcome_name(r.outcome), r.diverged ? " (diverged)" : "");
    std::printf("touch: %s s   settle: %s s\n",
                r.touch_time >= 0 ? format_g9(r.touch_time).c_str() : "never",
                r.settle_time >= 0 ? format_g9(r.settle_time).c_str() : "never");
    std::printf("torque magnitude: %.4f N*m at touch, %.4f N*m final\n", r.touch_torque,
                r.final_torque);
    if (std::isfinite(r.pose_change_deg)) {
      std::printf("pose change: %.2f deg\n", r.pose_change_deg);
    }
    return r.diverged ? 1 : 0;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
