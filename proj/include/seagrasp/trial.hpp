#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "seagrasp/controllers.hpp"
#include "seagrasp/world.hpp"

namespace sg {

// One grasp attempt: place the object, pre-shape the distal joints, close until
// both fingers report touch, squeeze with the selected controller, wait for the
// world to settle, classify what is left in the hand.

enum class ControllerKind {
  Mimo,        // PI controller on all eight measurements
  FixedRatio,  // constant proximal/distal torque split on the four-SEA gripper
  PhysUA,      // two-SEA underactuated transmission, ratio fixed by the pulleys
  Transition,  // Mimo until settled, then FixedRatio to pull the object in
};

enum class Outcome { FingertipStable, Enveloped, JointLimited, Ejected, Timeout };

const char* outcome_name(Outcome o);
bool outcome_success(Outcome o);

struct TrialSpec {
  ControllerKind controller = ControllerKind::Mimo;
  double ratio = 0.5;                  // distal/proximal torque split for the baselines
  ObjectShape object = make_circle(0.067);
  Vec2 location{0.0, 0.120};           // m, object center at placement
  std::optional<double> initial_pose;  // rad, distal pre-curl; joint-observable only
  double mu = 0.4;
  std::string friction_label = "vinyl";
  uint64_t seed = 0;
};

// "mimo", "fr-0.4", "ua-0.3", "transition"
std::string controller_label(const TrialSpec& spec);
double friction_mu(const std::string& label);  // rubber -> 1.2, vinyl -> 0.4

struct NoiseParams {
  double angle_std = 0.0;   // rad, per measured angle per tick
  double torque_std = 0.0;  // N*m
};

struct TrialParams {
  GripperParams gripper{};  // transmission is overridden per TrialSpec
  SeaParams sea{};
  PhysicsParams physics{};
  double control_dt = 0.01;  // s, controller tick; SEA servo runs at the substep
  GainSchedule gains{};
  double integrator_clamp = 0.5;
  JointVector torque_maxima{{0.4, 0.2, 0.4, 0.2}};  // N*m squeeze references
  ApproachParams approach{};
  SettleThresholds settle{};
  double settle_window = 0.5;  // s
  double timeout = 20.0;       // s simulated
  Range workspace_x{-0.15, 0.15};  // m, ejection band
  Range workspace_y{0.01, 0.20};
  NoiseParams noise{};
  double transition_ratio = 0.5;
  // The post-transition squeeze starts at this proximal torque and slews up to
  // the proximal maximum at the ramp rate. Stepping straight to the ceiling
  // shoots the object sideways off the fingertips before the distal links can
  // wrap it; a gradual squeeze walks it into the hand instead.
  double transition_proximal_torque = 0.05;
  double transition_ramp_rate = 0.05;  // N*m/s

  void validate() const;
};

struct TraceSample {
  double time = 0.0;
  JointVector joints;
  JointVector velocities;
  std::array<double, 4> tendon_forces{};  // N; underactuated uses the first two
  Vec2 object_position;
  double object_heading = 0.0;
  Vec2 object_velocity;
  double object_omega = 0.0;
  int contact_count = 0;
  int phase = 0;  // 0 approach, 1 squeeze, 2 post-transition squeeze
};

struct TrialTrace {
  std::vector<TraceSample> samples;
};

struct TrialResult {
  Outcome outcome = Outcome::Timeout;
  bool success = false;
  bool diverged = false;
  bool settled = false;
  double touch_time = -1.0;   // s, -1 when touch never fired
  double settle_time = -1.0;  // s, -1 when the trial timed out
  // Euclidean joint-space distance between the touch snapshot and the final
  // measured pose, degrees. NaN for transmissions without joint sensing.
  double pose_change_deg = 0.0;
  double touch_torque = 0.0;  // N*m, measured torque vector magnitude at touch
  double final_torque = 0.0;  // N*m, same magnitude at the end state
  Wrench settle_wrench{};
  StepStats stats{};
  uint64_t traj_hash = 0;
  WorldState final_world{};  // state at loop exit, for post-hoc queries
};

TrialResult run_trial(const TrialSpec& spec, const TrialParams& params,
                      TrialTrace* trace = nullptr);

}  // namespace sg
