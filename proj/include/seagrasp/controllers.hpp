#pragma once

#include <array>

#include "seagrasp/gripper.hpp"
#include "seagrasp/types.hpp"

namespace sg {

// Grasp control laws. The plant interface is 8 measurements (4 joint angles then
// 4 joint torques, canonical joint order) and 4 motor position commands.

using Mat48 = std::array<std::array<double, 8>, 4>;

// Six baseline gains and four coupling weights. Baselines scale by signal class
// (proximal/distal angle, proximal/distal torque, proximal/distal integral);
// weights select own-channel vs cross-channel coupling.
struct GainSchedule {
  std::array<double, 6> b{0.2, 0.5, 4.0, 8.0, 1.0, 1.0};
  std::array<double, 4> w{1.0, 0.3, 1.0, 0.5};
};

struct GainMatrices {
  Mat48 kp{};           // proportional, angle block then torque block
  Mat48 ki{};           // integral, torque block identically zero
  Mat48 feedforward{};  // [I4 | 0]: passes desired angles straight through
};

GainMatrices build_gain_matrices(const GainSchedule& g);

struct ReferenceVector {
  JointVector angles;   // rad, desired joint angles
  JointVector torques;  // N*m, desired joint torques
};

// References for the squeeze: hold the touch pose, ask for the torque maxima.
ReferenceVector make_reference(const JointVector& touch_angles, const JointVector& torque_maxima);

struct ControllerState {
  JointVector integrator;  // rad*s, accumulated angle error only
};

struct MimoParams {
  GainMatrices gains{};
  double integrator_clamp = 0.5;  // rad*s, per channel
};

// One PI tick: c = F*u + Kp*(u - y) + Ki*integral(u - y). Only angle errors are
// integrated. Requires full feedback; throws SimDivergence on non-finite input.
JointVector mimo_step(const ReferenceVector& u, const FeedbackVector& y, ControllerState& st,
                      const MimoParams& p, double dt);

// Constant torque distribution: (tp, ratio*tp, tp, ratio*tp), executed in SEA
// torque mode. Negative proximal references are rejected.
JointVector fixed_ratio_setpoints(double proximal_ref, double ratio);

struct TouchParams {
  double torque_factor = 2.0;            // fire above factor * free-motion baseline
  double speed_threshold = deg_to_rad(1.0);  // rad/s
  double dwell = 0.05;                   // s both conditions must hold
  double baseline_floor = 0.002;         // N*m added to the modeled baseline
};

// Free-motion torque model for the approach: restoring spring plus viscous drag.
double free_motion_torque_baseline(const RestoringSpring& spring, double angle, double speed,
                                   double joint_damping, const TouchParams& tp);

// Declares touch when, per finger, the measured proximal torque exceeds the
// free-motion baseline by the configured factor while the drive is stalled, both
// sustained over the dwell. Latches once fired.
class TouchDetector {
 public:
  TouchDetector() = default;
  TouchDetector(const TouchParams& params, double arm_time)
      : params_(params), arm_time_(arm_time) {}

  void update_finger(int finger, double measured_torque, double baseline, double speed,
                     double time);
  bool finger_touched(int finger) const { return fired_[static_cast<size_t>(finger)]; }
  bool touched() const { return fired_[0] && fired_[1]; }

 private:
  TouchParams params_{};
  double arm_time_ = 0.0;  // ignore everything before the torque ramp completes
  std::array<double, 2> condition_since_{-1.0, -1.0};
  std::array<bool, 2> fired_{false, false};
};

struct ApproachParams {
  double torque = 0.05;    // N*m, proximal closing reference after the ramp
  double ramp_time = 0.5;  // s, linear ramp from zero
  TouchParams touch{};
};

// Closing torque reference at time t since approach start.
double approach_torque(double t, const ApproachParams& p);

}  // namespace sg
