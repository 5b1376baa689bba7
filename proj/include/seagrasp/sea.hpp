#pragma once

#include "seagrasp/types.hpp"

namespace sg {

// Series elastic actuator: motor shaft -> torsion spring -> output pulley -> tendon.
// Tendon tension is read from the spring deflection between the two shaft encoders:
//
//   F = K_spring * (theta_pulley - theta_motor) / R_pulley,  clamped at zero (pull only).
//
// All SEA angles live on the actuator's own encoder axis. The mechanism layer maps
// between joint flexion angles and this axis (see gripper.hpp).

enum class ControlMode {
  MotorPosition,   // setpoint: motor angle, rad
  PulleyPosition,  // setpoint: pulley angle, rad
  Torque,          // setpoint: pulley torque F * R_pulley, N*m, must be >= 0
};

struct SeaParams {
  double spring_stiffness = 0.05;  // N*m/rad, torsion spring between motor and pulley
  double pulley_radius = 0.01;     // m
  double motor_max_speed = 10.0;   // rad/s, slew limit of the position-servoed motor
  Range motor_angle_range{-60.0, 60.0};  // rad
  double pulley_position_gain = 5.0;     // proportional gain for PulleyPosition mode

  bool valid() const {
    return spring_stiffness > 0.0 && pulley_radius > 0.0 && motor_max_speed > 0.0 &&
           motor_angle_range.valid() && pulley_position_gain > 0.0;
  }
  void validate() const;  // throws std::invalid_argument
};

struct SeaState {
  double theta_motor = 0.0;   // rad
  double theta_pulley = 0.0;  // rad
  ControlMode mode = ControlMode::MotorPosition;
  double setpoint = 0.0;      // rad or N*m depending on mode
};

struct TendonForce {
  double newtons = 0.0;
  bool slack = false;  // true when the unclamped force would be negative
};

// Pull-only tendon tension from the current spring deflection.
TendonForce tendon_force(const SeaState& s, const SeaParams& p);

// Motor position command for the current mode, evaluated once per control tick.
//   MotorPosition: the setpoint itself.
//   PulleyPosition: proportional correction on pulley-angle error.
//   Torque: the motor position whose steady-state deflection yields the setpoint.
double mode_step(const SeaState& s, const SeaParams& p);

// Advance the rate-limited motor toward a command over dt. Pure; returns the new state.
SeaState step_motor(double command, SeaState s, const SeaParams& p, double dt);

// Change mode and setpoint. Rejects negative torque setpoints (tendons cannot push).
void set_mode(SeaState& s, ControlMode mode, double setpoint);

}  // namespace sg
