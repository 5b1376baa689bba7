#include "seagrasp/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sg {

GainMatrices build_gain_matrices(const GainSchedule& g) {
  GainMatrices m;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const double weight = (i == j) ? g.w[0] : g.w[1];
      const double kp_base = is_proximal_joint(j) ? g.b[0] : g.b[1];
      const double ki_base = is_proximal_joint(j) ? g.b[4] : g.b[5];
      m.kp[i][j] = weight * kp_base;
      m.ki[i][j] = weight * ki_base;
      m.feedforward[i][j] = (i == j) ? 1.0 : 0.0;
    }
    for (int j = 4; j < 8; ++j) {
      const int jq = j - 4;
      const double weight = (i == jq) ? g.w[2] : g.w[3];
      const double base = is_proximal_joint(jq) ? g.b[2] : g.b[3];
      m.kp[i][j] = weight * base;
      m.ki[i][j] = 0.0;
      m.feedforward[i][j] = 0.0;
    }
  }
  return m;
}

ReferenceVector make_reference(const JointVector& touch_angles, const JointVector& torque_maxima) {
  return ReferenceVector{touch_angles, torque_maxima};
}

JointVector mimo_step(const ReferenceVector& u, const FeedbackVector& y, ControllerState& st,
                      const MimoParams& p, double dt) {
  const JointVector ya = y.measured_angles();
  const JointVector yt = y.measured_torques();

  std::array<double, 8> uvec{};
  std::array<double, 8> e{};
  for (int j = 0; j < 4; ++j) {
    uvec[j] = u.angles[j];
    uvec[j + 4] = u.torques[j];
    e[j] = u.angles[j] - ya[j];
    e[j + 4] = u.torques[j] - yt[j];
  }
  for (double v : e) {
    if (!std::isfinite(v)) throw SimDivergence("non-finite controller error");
  }

  const double lim = p.integrator_clamp;
  for (int j = 0; j < 4; ++j) {
    st.integrator[j] = std::clamp(st.integrator[j] + e[j] * dt, -lim, lim);
  }

  JointVector c;
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 8; ++j) {
      acc += p.gains.feedforward[i][j] * uvec[j] + p.gains.kp[i][j] * e[j];
    }
    for (int j = 0; j < 4; ++j) {
      acc += p.gains.ki[i][j] * st.integrator[j];
    }
    c[i] = acc;
  }
  if (!c.all_finite()) throw SimDivergence("non-finite controller output");
  return c;
}

JointVector fixed_ratio_setpoints(double proximal_ref, double ratio) {
  if (proximal_ref < 0.0) throw std::invalid_argument("negative torque reference");
  const double distal = ratio * proximal_ref;
  return JointVector{{proximal_ref, distal, proximal_ref, distal}};
}

double free_motion_torque_baseline(const RestoringSpring& spring, double angle, double speed,
                                   double joint_damping, const TouchParams& tp) {
  const double spring_mag = std::abs(spring.stiffness * (angle - spring.rest_angle));
  return spring_mag + joint_damping * std::abs(speed) + tp.baseline_floor;
}

void TouchDetector::update_finger(int finger, double measured_torque, double baseline,
                                  double speed, double time) {
  auto f = static_cast<size_t>(finger);
  if (fired_[f]) return;
  const bool armed = time >= arm_time_;
  const bool loaded = measured_torque >= params_.torque_factor * baseline;
  const bool stalled = std::abs(speed) < params_.speed_threshold;
  if (armed && loaded && stalled) {
    if (condition_since_[f] < 0.0) condition_since_[f] = time;
    if (time - condition_since_[f] >= params_.dwell) fired_[f] = true;
  } else {
    condition_since_[f] = -1.0;
  }
}

double approach_torque(double t, const ApproachParams& p) {
  if (t <= 0.0) return 0.0;
  if (t >= p.ramp_time) return p.torque;
  return p.torque * (t / p.ramp_time);
}

}  // namespace sg
