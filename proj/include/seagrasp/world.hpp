#pragma once

#include <algorithm>
#include <span>

#include "seagrasp/contact.hpp"
#include "seagrasp/gripper.hpp"
#include "seagrasp/sea.hpp"
#include "seagrasp/shapes.hpp"
#include "seagrasp/types.hpp"

namespace sg {

struct PhysicsParams {
  double substep_dt = 2e-4;            // s, fixed integration step
  PenaltyParams penalty{};             // contact model constants
  double joint_inertia = 1e-4;         // kg*m^2, lumped per joint
  double joint_damping = 0.01;         // N*m*s/rad
  double object_mass = 0.1;            // kg
  double object_linear_damping = 0.5;  // N*s/m, stands in for out-of-plane support
  double object_angular_damping = 0.001;  // N*m*s

  void validate() const;
};

struct ObjectState {
  ObjectShape shape{};
  Vec2 position;
  double heading = 0.0;  // rad
  Vec2 velocity;
  double omega = 0.0;    // rad/s
  double mass = 0.1;
  double inertia = 1e-4;
};

ObjectState make_object(const ObjectShape& shape, const Vec2& position, double mass);

struct WorldState {
  GripperState gripper;
  std::array<SeaState, 4> sea{};
  int sea_count = 4;
  ObjectState object;
  ContactSet contacts;  // consistent with the rest of the state
  double time = 0.0;

  std::span<const SeaState> seas() const { return {sea.data(), static_cast<size_t>(sea_count)}; }
  std::span<SeaState> seas() { return {sea.data(), static_cast<size_t>(sea_count)}; }
};

// Gripper at `joints` (zero velocity), SEAs relaxed (zero deflection), object at
// rest. Contacts are detected so the returned state is self-consistent.
WorldState make_initial_world(const GripperParams& gp, const JointVector& joints,
                              const ObjectState& object);

struct StepStats {
  double max_penetration = 0.0;      // m
  double max_cone_violation = 0.0;   // N, max over steps of |ft| - mu*fn
  double min_normal_force = 0.0;     // N, most negative normal seen (0 if none)
  void merge(const StepStats& o);
};

struct Wrench {
  Vec2 force;
  double torque = 0.0;  // about the object center
};

// One semi-implicit substep. Contact forces come from the stored contact set and
// current velocities; joint limits are hard stops (position clamped, outward
// velocity zeroed); contacts are re-detected for the returned state.
// `contact_wrench`, when given, receives the net normal plus friction wrench
// this substep applied to the object.
// Throws SimDivergence if the state stops being finite.
WorldState step_world(const WorldState& w, const JointVector& applied_joint_torques,
                      const GripperParams& gp, const PhysicsParams& pp,
                      const MaterialPair& pair, StepStats* stats = nullptr,
                      Wrench* contact_wrench = nullptr);

// Net contact wrench on the object for the given state: the normal and friction
// forces the next substep would apply under these joint torques. Consistent
// with step_world by construction; roughly zero for a grasp at rest.
Wrench net_wrench(const WorldState& w, const JointVector& applied_joint_torques,
                  const GripperParams& gp, const PhysicsParams& pp, const MaterialPair& pair);

// Torque each joint carries from the contacts (normals plus friction), from the
// same solve. Adding this to the applied torques gives the load a joint stop
// must hold, which is what decides whether a joint is pinned at a limit.
JointVector contact_joint_torques(const WorldState& w, const JointVector& applied_joint_torques,
                                  const GripperParams& gp, const PhysicsParams& pp,
                                  const MaterialPair& pair);

struct SettleThresholds {
  double joint_speed = deg_to_rad(0.5);  // rad/s
  double object_speed = 1e-3;            // m/s
  double object_spin = deg_to_rad(0.5);  // rad/s
};

bool state_quiet(const WorldState& w, const SettleThresholds& th);

// True when the history covers at least `window` seconds and every state in the
// trailing window passes the thresholds.
bool is_settled(std::span<const WorldState> history, double window, const SettleThresholds& th);

// Peak speeds over some interval, typically the substeps of one control tick.
// Judging settling on peaks instead of sampled states matters: a contact limit
// cycle with a period dividing the tick length looks quiet at tick boundaries.
struct MotionPeak {
  double joint_speed = 0.0;   // rad/s
  double object_speed = 0.0;  // m/s
  double object_spin = 0.0;   // rad/s

  void absorb(const WorldState& w) {
    joint_speed = std::max(joint_speed, w.gripper.velocities.max_abs());
    object_speed = std::max(object_speed, norm(w.object.velocity));
    object_spin = std::max(object_spin, std::abs(w.object.omega));
  }
  bool quiet(const SettleThresholds& th) const {
    return joint_speed < th.joint_speed && object_speed < th.object_speed &&
           object_spin < th.object_spin;
  }
};

// O(1) equivalent of is_settled for streaming use.
struct SettleMonitor {
  double window = 0.5;
  double quiet_since = -1.0;

  bool update(double time, const MotionPeak& peak, const SettleThresholds& th) {
    if (!peak.quiet(th)) {
      quiet_since = -1.0;
      return false;
    }
    if (quiet_since < 0.0) quiet_since = time;
    return time - quiet_since >= window;
  }
  void reset() { quiet_since = -1.0; }
};

}  // namespace sg
