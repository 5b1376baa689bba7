#pragma once

#include <array>
#include <span>

#include "seagrasp/contact.hpp"
#include "seagrasp/sea.hpp"
#include "seagrasp/types.hpp"

namespace sg {

// Two fingers on a palm line, two revolute joints each, tendon-driven through SEAs.
// Joint angles are flexion-positive: 0 points straight away from the palm, positive
// curls inward toward the opposing finger. Finger 1 sits at the negative-x base.

enum class TransmissionKind {
  FullyActuated,   // one SEA per joint; distal tendon routed through the proximal axis
  Underactuated,   // one SEA per finger; distal pulley radius = ratio * proximal
};

struct Transmission {
  TransmissionKind kind = TransmissionKind::FullyActuated;
  double distal_ratio = 0.5;  // distal/proximal gross torque ratio, Underactuated only

  int sea_count() const { return kind == TransmissionKind::FullyActuated ? 4 : 2; }
};

struct RestoringSpring {
  double stiffness = 0.01;  // N*m/rad
  double rest_angle = 0.0;  // rad, extension springs pull back toward this
};

struct GripperParams {
  double proximal_length = 0.080;  // m
  double distal_length = 0.070;    // m
  double link_radius = 0.008;      // m, capsule radius of both links
  std::array<Vec2, 2> base = {Vec2{-0.040, 0.0}, Vec2{0.040, 0.0}};
  double joint_pulley_radius = 0.010;  // m, tendon moment arm at the joints
  std::array<RestoringSpring, 4> spring{};
  std::array<Range, 4> limit{};
  Transmission transmission{};

  GripperParams();
  void validate() const;

  // +1 for finger 1 (flexes toward +x), -1 for finger 2; mirrored arithmetic keeps
  // the two fingers bitwise symmetric.
  double inward_sign(int finger) const { return finger == 0 ? 1.0 : -1.0; }
};

struct GripperState {
  JointVector joints;      // rad
  JointVector velocities;  // rad/s
};

struct FingerPoints {
  Vec2 base;
  Vec2 elbow;  // distal joint position
  Vec2 tip;
};

// Link capsules in canonical link order (proximal1, distal1, proximal2, distal2).
std::array<Capsule, 4> forward_kinematics(const GripperParams& p, const JointVector& joints);
FingerPoints finger_points(const GripperParams& p, const JointVector& joints, int finger);

// World-frame angular velocity (z) of a link and velocity of a world point on it.
double link_angular_velocity(const GripperParams& p, const GripperState& s, int link_id);
Vec2 link_point_velocity(const GripperParams& p, const GripperState& s, int link_id,
                         const Vec2& point);

// Generalized torques on the four joints from a force applied to the object at
// `point` by link `link_id` (the link receives the reaction -force_on_object).
JointVector contact_reaction_torques(const GripperParams& p, const JointVector& joints,
                                     int link_id, const Vec2& point, const Vec2& force_on_object);

// Reflected inverse mass of the link surface point along unit direction `dir`:
// sum over the joints carrying the link of (lever about that joint)^2 / inertia.
double link_inverse_mass(const GripperParams& p, const JointVector& joints, int link_id,
                         const Vec2& point, const Vec2& dir, double joint_inertia);

struct TorqueBreakdown {
  JointVector gross;   // tendon torque at each joint, >= 0
  JointVector spring;  // restoring spring torque, positive = flexion
  JointVector net;     // gross + spring
};

// Map tendon forces (one per SEA) to joint torques. FullyActuated: exact joint-wise
// decoupling. Underactuated: per finger, gross distal = ratio * gross proximal.
TorqueBreakdown joint_torque_breakdown(const GripperParams& p, const JointVector& joints,
                                       std::span<const double> tendon_forces);
JointVector joint_torques(const GripperParams& p, const JointVector& joints,
                          std::span<const double> tendon_forces);

// Joint <-> SEA axis coupling. Equal pulley radii make the magnitude map identity;
// the SEA encoder axis runs opposite the flexion winding direction, hence the sign.
double pulley_angle_from_joints(const GripperParams& p, const JointVector& joints, int sea_index);
double sea_position_command(double joint_frame_command);  // motor/pulley setpoint, rad
double joint_angle_from_pulley(double theta_pulley);      // FullyActuated only
// Desired joint torque -> SEA pulley torque setpoint (N*m, always >= 0 demanded).
double sea_torque_setpoint(const GripperParams& p, const SeaParams& sea, double joint_torque);

// Proprioceptive measurement vector. Angle entries exist only for the fully
// actuated transmission; the underactuated build exposes proximal torques alone.
class FeedbackVector {
 public:
  static FeedbackVector fully_actuated(const JointVector& angles, const JointVector& torques);
  static FeedbackVector underactuated(double proximal_torque_1, double proximal_torque_2);

  bool angles_available() const { return angles_ok_; }
  bool full_torques_available() const { return torques_ok_; }
  const JointVector& measured_angles() const;   // throws std::logic_error when masked
  const JointVector& measured_torques() const;  // throws std::logic_error when masked
  double proximal_torque(int finger) const;     // available for every transmission

  // In-place measurement perturbation for optional sensor noise.
  void perturb(const JointVector& angle_delta, const JointVector& torque_delta);

 private:
  JointVector angles_;
  JointVector torques_;
  bool angles_ok_ = false;
  bool torques_ok_ = false;
};

FeedbackVector observable_feedback(const GripperParams& p, std::span<const SeaState> seas,
                                   const SeaParams& sea_params);

}  // namespace sg
