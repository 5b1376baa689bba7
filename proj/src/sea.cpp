#include "seagrasp/sea.hpp"

#include <algorithm>
#include <stdexcept>

namespace sg {

void SeaParams::validate() const {
  if (spring_stiffness <= 0.0) throw std::invalid_argument("sea: spring_stiffness must be > 0");
  if (pulley_radius <= 0.0) throw std::invalid_argument("sea: pulley_radius must be > 0");
  if (motor_max_speed <= 0.0) throw std::invalid_argument("sea: motor_max_speed must be > 0");
  if (!motor_angle_range.valid()) throw std::invalid_argument("sea: motor_angle_range is empty");
  if (pulley_position_gain <= 0.0) throw std::invalid_argument("sea: pulley_position_gain must be > 0");
}

TendonForce tendon_force(const SeaState& s, const SeaParams& p) {
  const double raw = p.spring_stiffness * (s.theta_pulley - s.theta_motor) / p.pulley_radius;
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

double mode_step(const SeaState& s, const SeaParams& p) {
  switch (s.mode) {
    case ControlMode::MotorPosition:
      return s.setpoint;
    case ControlMode::PulleyPosition:
      // Winding direction is negative on this axis: pulley error above target needs
      // the motor driven further below to raise tension and pull the error in.
      return s.setpoint - p.pulley_position_gain * (s.theta_pulley - s.setpoint);
    case ControlMode::Torque:
      // Invert the deflection law: deflection = setpoint / K gives the requested
      // pulley torque once the motor arrives.
      return s.theta_pulley - s.setpoint / p.spring_stiffness;
  }
  return s.setpoint;  // unreachable
}

SeaState step_motor(double command, SeaState s, const SeaParams& p, double dt) {
  const double target = p.motor_angle_range.clamp(command);
  const double max_step = p.motor_max_speed * dt;
  const double delta = target - s.theta_motor;
  s.theta_motor += std::clamp(delta, -max_step, max_step);
  return s;
}

void set_mode(SeaState& s, ControlMode mode, double setpoint) {
  if (mode == ControlMode::Torque && setpoint < 0.0) {
    throw std::invalid_argument("sea: negative torque setpoint");
  }
  // theta_motor is untouched: mode switches are glitch-free by construction.
  s.mode = mode;
  s.setpoint = setpoint;
}

}  // namespace sg
