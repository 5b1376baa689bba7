#include "seagrasp/gripper.hpp"

#include <cmath>
#include <stdexcept>

namespace sg {

GripperParams::GripperParams() {
  limit[kProximal1] = limit[kProximal2] = Range{deg_to_rad(-45.0), deg_to_rad(100.0)};
  limit[kDistal1] = limit[kDistal2] = Range{deg_to_rad(-10.0), deg_to_rad(110.0)};
  for (int j = 0; j < 4; ++j) {
    spring[static_cast<size_t>(j)] = RestoringSpring{0.01, limit[static_cast<size_t>(j)].lo};
  }
}

void GripperParams::validate() const {
  if (proximal_length <= 0.0 || distal_length <= 0.0) {
    throw std::invalid_argument("gripper: link lengths must be > 0");
  }
  if (link_radius <= 0.0) throw std::invalid_argument("gripper: link_radius must be > 0");
  if (joint_pulley_radius <= 0.0) {
    throw std::invalid_argument("gripper: joint_pulley_radius must be > 0");
  }
  if (base[0].x == base[1].x && base[0].y == base[1].y) {
    throw std::invalid_argument("gripper: finger bases coincide");
  }
  for (int j = 0; j < 4; ++j) {
    if (!limit[static_cast<size_t>(j)].valid()) {
      throw std::invalid_argument("gripper: empty joint limit range");
    }
    if (spring[static_cast<size_t>(j)].stiffness < 0.0) {
      throw std::invalid_argument("gripper: negative spring stiffness");
    }
  }
  if (transmission.kind == TransmissionKind::Underactuated &&
      !(transmission.distal_ratio > 0.0)) {
    throw std::invalid_argument("gripper: underactuated distal_ratio must be > 0");
  }
}

FingerPoints finger_points(const GripperParams& p, const JointVector& joints, int finger) {
  const double m = p.inward_sign(finger);
  const double tp = joints[proximal_joint_of(finger)];
  const double td = joints[distal_joint_of(finger)];
  FingerPoints out;
  out.base = p.base[static_cast<size_t>(finger)];
  // Flexion angle 0 points along +y (away from the palm); positive curls inward.
  out.elbow = out.base + Vec2{m * (p.proximal_length * std::sin(tp)),
                              p.proximal_length * std::cos(tp)};
  out.tip = out.elbow + Vec2{m * (p.distal_length * std::sin(tp + td)),
                             p.distal_length * std::cos(tp + td)};
  return out;
}

std::array<Capsule, 4> forward_kinematics(const GripperParams& p, const JointVector& joints) {
  std::array<Capsule, 4> links;
  for (int finger = 0; finger < 2; ++finger) {
    const FingerPoints fp = finger_points(p, joints, finger);
    links[static_cast<size_t>(proximal_joint_of(finger))] =
        Capsule{fp.base, fp.elbow, p.link_radius};
    links[static_cast<size_t>(distal_joint_of(finger))] =
        Capsule{fp.elbow, fp.tip, p.link_radius};
  }
  return links;
}

namespace {
// World z angular rate per unit flexion rate: finger 1 flexes clockwise.
double spin_sign(const GripperParams& p, int finger) { return -p.inward_sign(finger); }
}  // namespace

double link_angular_velocity(const GripperParams& p, const GripperState& s, int link_id) {
  const int finger = finger_of_joint(link_id);
  const double sign = spin_sign(p, finger);
  double rate = s.velocities[proximal_joint_of(finger)];
  if (!is_proximal_joint(link_id)) rate += s.velocities[distal_joint_of(finger)];
  return sign * rate;
}

Vec2 link_point_velocity(const GripperParams& p, const GripperState& s, int link_id,
                         const Vec2& point) {
  const int finger = finger_of_joint(link_id);
  const double sign = spin_sign(p, finger);
  const FingerPoints fp = finger_points(p, s.joints, finger);
  Vec2 v = perp(point - fp.base) * (sign * s.velocities[proximal_joint_of(finger)]);
  if (!is_proximal_joint(link_id)) {
    v += perp(point - fp.elbow) * (sign * s.velocities[distal_joint_of(finger)]);
  }
  return v;
}

JointVector contact_reaction_torques(const GripperParams& p, const JointVector& joints,
                                     int link_id, const Vec2& point,
                                     const Vec2& force_on_object) {
  const int finger = finger_of_joint(link_id);
  const double sign = spin_sign(p, finger);
  const FingerPoints fp = finger_points(p, joints, finger);
  JointVector q;
  // Generalized force on a flexion coordinate: (dp/dtheta) . (-f).
  q[proximal_joint_of(finger)] = -sign * cross(point - fp.base, force_on_object);
  if (!is_proximal_joint(link_id)) {
    q[distal_joint_of(finger)] = -sign * cross(point - fp.elbow, force_on_object);
  }
  return q;
}

double link_inverse_mass(const GripperParams& p, const JointVector& joints, int link_id,
                         const Vec2& point, const Vec2& dir, double joint_inertia) {
  const int finger = finger_of_joint(link_id);
  const FingerPoints fp = finger_points(p, joints, finger);
  const double lever_p = cross(point - fp.base, dir);
  double inv = lever_p * lever_p / joint_inertia;
  if (!is_proximal_joint(link_id)) {
    const double lever_d = cross(point - fp.elbow, dir);
    inv += lever_d * lever_d / joint_inertia;
  }
  return inv;
}

TorqueBreakdown joint_torque_breakdown(const GripperParams& p, const JointVector& joints,
                                       std::span<const double> tendon_forces) {
  const int expected = p.transmission.sea_count();
  if (static_cast<int>(tendon_forces.size()) != expected) {
    throw std::invalid_argument("joint_torques: tendon force count does not match transmission");
  }
  TorqueBreakdown out;
  if (p.transmission.kind == TransmissionKind::FullyActuated) {
    // Distal tendons pass through the proximal joint axis: exact decoupling.
    for (int j = 0; j < 4; ++j) {
      out.gross[j] = tendon_forces[static_cast<size_t>(j)] * p.joint_pulley_radius;
    }
  } else {
    for (int finger = 0; finger < 2; ++finger) {
      const double gross_proximal =
          tendon_forces[static_cast<size_t>(finger)] * p.joint_pulley_radius;
      out.gross[proximal_joint_of(finger)] = gross_proximal;
      out.gross[distal_joint_of(finger)] = p.transmission.distal_ratio * gross_proximal;
    }
  }
  for (int j = 0; j < 4; ++j) {
    const RestoringSpring& sp = p.spring[static_cast<size_t>(j)];
    out.spring[j] = -sp.stiffness * (joints[j] - sp.rest_angle);
    out.net[j] = out.gross[j] + out.spring[j];
  }
  return out;
}

JointVector joint_torques(const GripperParams& p, const JointVector& joints,
                          std::span<const double> tendon_forces) {
  return joint_torque_breakdown(p, joints, tendon_forces).net;
}

double pulley_angle_from_joints(const GripperParams& p, const JointVector& joints,
                                int sea_index) {
  if (p.transmission.kind == TransmissionKind::FullyActuated) {
    return -joints[sea_index];
  }
  // Single tendon over both joint pulleys; the distal pulley is scaled by the ratio.
  const int finger = sea_index;
  return -(joints[proximal_joint_of(finger)] +
           p.transmission.distal_ratio * joints[distal_joint_of(finger)]);
}

double sea_position_command(double joint_frame_command) { return -joint_frame_command; }

double joint_angle_from_pulley(double theta_pulley) { return -theta_pulley; }

double sea_torque_setpoint(const GripperParams& p, const SeaParams& sea, double joint_torque) {
  const double tendon = std::max(0.0, joint_torque) / p.joint_pulley_radius;
  return tendon * sea.pulley_radius;
}

FeedbackVector FeedbackVector::fully_actuated(const JointVector& angles,
                                              const JointVector& torques) {
  FeedbackVector f;
  f.angles_ = angles;
  f.torques_ = torques;
  f.angles_ok_ = true;
  f.torques_ok_ = true;
  return f;
}

FeedbackVector FeedbackVector::underactuated(double proximal_torque_1,
                                             double proximal_torque_2) {
  FeedbackVector f;
  f.torques_[kProximal1] = proximal_torque_1;
  f.torques_[kProximal2] = proximal_torque_2;
  return f;
}

const JointVector& FeedbackVector::measured_angles() const {
  if (!angles_ok_) throw std::logic_error("feedback: joint angles are not observable");
  return angles_;
}

const JointVector& FeedbackVector::measured_torques() const {
  if (!torques_ok_) throw std::logic_error("feedback: full torque vector is not observable");
  return torques_;
}

double FeedbackVector::proximal_torque(int finger) const {
  return torques_[proximal_joint_of(finger)];
}

void FeedbackVector::perturb(const JointVector& angle_delta, const JointVector& torque_delta) {
  if (angles_ok_) angles_ = angles_ + angle_delta;
  if (torques_ok_) {
    torques_ = torques_ + torque_delta;
  } else {
    torques_[kProximal1] += torque_delta[kProximal1];
    torques_[kProximal2] += torque_delta[kProximal2];
  }
}

FeedbackVector observable_feedback(const GripperParams& p, std::span<const SeaState> seas,
                                   const SeaParams& sea_params) {
  if (p.transmission.kind == TransmissionKind::FullyActuated) {
    JointVector angles, torques;
    for (int j = 0; j < 4; ++j) {
      const SeaState& s = seas[static_cast<size_t>(j)];
      angles[j] = joint_angle_from_pulley(s.theta_pulley);
      torques[j] = tendon_force(s, sea_params).newtons * p.joint_pulley_radius;
    }
    return FeedbackVector::fully_actuated(angles, torques);
  }
  const double t1 = tendon_force(seas[0], sea_params).newtons * p.joint_pulley_radius;
  const double t2 = tendon_force(seas[1], sea_params).newtons * p.joint_pulley_radius;
  return FeedbackVector::underactuated(t1, t2);
}

}  // namespace sg
