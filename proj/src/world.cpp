#include "seagrasp/world.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sg {

void PhysicsParams::validate() const {
  if (substep_dt <= 0.0) throw std::invalid_argument("physics: substep_dt must be > 0");
  if (penalty.normal_stiffness <= 0.0) {
    throw std::invalid_argument("physics: contact stiffness must be > 0");
  }
  if (penalty.slip_velocity_threshold <= 0.0) {
    throw std::invalid_argument("physics: slip velocity threshold must be > 0");
  }
  if (joint_inertia <= 0.0) throw std::invalid_argument("physics: joint inertia must be > 0");
  if (object_mass <= 0.0) throw std::invalid_argument("physics: object mass must be > 0");
}

ObjectState make_object(const ObjectShape& shape, const Vec2& position, double mass) {
  shape.validate();
  ObjectState o;
  o.shape = shape;
  o.position = position;
  o.mass = mass;
  o.inertia = shape.inertia(mass);
  return o;
}

WorldState make_initial_world(const GripperParams& gp, const JointVector& joints,
                              const ObjectState& object) {
  WorldState w;
  w.gripper.joints = joints;
  w.object = object;
  w.sea_count = gp.transmission.sea_count();
  for (int i = 0; i < w.sea_count; ++i) {
    SeaState& s = w.sea[static_cast<size_t>(i)];
    s.theta_pulley = pulley_angle_from_joints(gp, joints, i);
    s.theta_motor = s.theta_pulley;  // zero deflection, slack-free start
    s.mode = ControlMode::MotorPosition;
    s.setpoint = s.theta_motor;
  }
  w.contacts = detect_contacts(forward_kinematics(gp, joints), object.shape, object.position,
                               object.heading);
  return w;
}

void StepStats::merge(const StepStats& o) {
  max_penetration = std::max(max_penetration, o.max_penetration);
  max_cone_violation = std::max(max_cone_violation, o.max_cone_violation);
  min_normal_force = std::min(min_normal_force, o.min_normal_force);
}

namespace {

constexpr int kFrictionSweeps = 8;

// One friction constraint row: the relative tangential velocity at a contact,
// expressed through the object twist and the joint rates. `jr` doubles as the
// generalized-force map (impulse lambda along `tangent` applied to the object
// loads joint j with lambda * jr[j]) and, negated, as the velocity Jacobian
// (link point velocity along `tangent` = -sum jr[j] * joint_rate[j]).
struct FrictionRow {
  int link_id = 0;
  Vec2 point;
  Vec2 tangent;
  double fn = 0.0;         // penalty normal force held fixed during the solve
  double cap = 0.0;        // impulse bound mu * fn * dt
  double lambda = 0.0;     // accumulated tangential impulse
  double lever_obj = 0.0;  // moment arm of tangent about the object center
  double m_eff = 0.0;      // solo effective mass of this row
  JointVector jr;
  bool slipping = false;
};

struct ContactSetup {
  int count = 0;
  std::array<FrictionRow, 8> rows;
  Vec2 normal_force;          // net normal force on the object
  double normal_torque = 0.0;
  JointVector normal_joint_torques;
};

Vec2 object_point_velocity(const ObjectState& o, const Vec2& point) {
  return o.velocity + perp(point - o.position) * o.omega;
}

// Penalty normal forces from the start-of-step state, plus the per-contact
// data the friction solve needs.
ContactSetup prepare_contacts(const WorldState& w, const GripperParams& gp,
                              const PhysicsParams& pp, const MaterialPair& pair) {
  ContactSetup setup;
  setup.count = w.contacts.count;
  for (int i = 0; i < w.contacts.count; ++i) {
    const Contact& c = w.contacts.items[static_cast<size_t>(i)];
    const Vec2 rel = object_point_velocity(w.object, c.point) -
                     link_point_velocity(gp, w.gripper, c.link_id, c.point);
    const double fn = contact_normal_force(c, rel, pp.penalty);

    const Vec2 nf = c.normal * fn;
    setup.normal_force += nf;
    setup.normal_torque += cross(c.point - w.object.position, nf);
    setup.normal_joint_torques =
        setup.normal_joint_torques +
        contact_reaction_torques(gp, w.gripper.joints, c.link_id, c.point, nf);

    FrictionRow& row = setup.rows[static_cast<size_t>(i)];
    row.link_id = c.link_id;
    row.point = c.point;
    row.tangent = perp(c.normal);
    row.fn = fn;
    row.cap = pair.mu * fn * pp.substep_dt;
    row.lever_obj = cross(c.point - w.object.position, row.tangent);
    row.jr = contact_reaction_torques(gp, w.gripper.joints, c.link_id, c.point, row.tangent);
    double inv = 1.0 / w.object.mass + row.lever_obj * row.lever_obj / w.object.inertia;
    for (int j = 0; j < 4; ++j) inv += row.jr[j] * row.jr[j] / pp.joint_inertia;
    row.m_eff = 1.0 / inv;
  }
  return setup;
}

// Gauss-Seidel over the friction rows: each pass recomputes the relative
// tangential velocity from the current (already corrected) velocities and
// moves the accumulated impulse toward cancelling it, clamped to the cone.
// Immediate application is what keeps multiple contacts on the same bodies
// from overshooting each other; the clamp is what makes |ft| <= mu * fn exact.
void solve_friction(ContactSetup& setup, const ObjectState& obj_ref, double object_mass,
                    double object_inertia, double joint_inertia, Vec2* v, double* omega,
                    JointVector* qd) {
  for (int sweep = 0; sweep < kFrictionSweeps; ++sweep) {
    for (int i = 0; i < setup.count; ++i) {
      FrictionRow& row = setup.rows[static_cast<size_t>(i)];
      if (row.cap <= 0.0) continue;
      double vt = dot(*v + perp(row.point - obj_ref.position) * (*omega), row.tangent);
      for (int j = 0; j < 4; ++j) vt += (*qd)[j] * row.jr[j];

      double target = row.lambda - vt * row.m_eff;
      target = std::clamp(target, -row.cap, row.cap);
      const double dl = target - row.lambda;
      row.lambda = target;
      if (dl == 0.0) continue;

      *v += row.tangent * (dl / object_mass);
      *omega += dl * row.lever_obj / object_inertia;
      for (int j = 0; j < 4; ++j) (*qd)[j] += dl * row.jr[j] / joint_inertia;
    }
  }
}

// Tentative velocities under the applied torques, penalty normal forces, and
// implicit viscous damping, then the friction solve against them. Both the
// integrator and the wrench query go through here so they agree on what the
// contacts exert.
struct VelocitySolve {
  ContactSetup setup;
  JointVector qd;
  Vec2 v;
  double omega = 0.0;
};

VelocitySolve solve_step_velocities(const WorldState& w, const JointVector& applied,
                                    const GripperParams& gp, const PhysicsParams& pp,
                                    const MaterialPair& pair) {
  const double dt = pp.substep_dt;
  VelocitySolve out;
  out.setup = prepare_contacts(w, gp, pp, pair);

  for (int j = 0; j < 4; ++j) {
    const double torque = applied[j] + out.setup.normal_joint_torques[j];
    double om = w.gripper.velocities[j] + dt * torque / pp.joint_inertia;
    om /= 1.0 + dt * pp.joint_damping / pp.joint_inertia;
    // A joint already on its stop cannot be pushed further; zero that velocity
    // now so friction reacts to the true (blocked) link motion.
    const Range& lim = gp.limit[static_cast<size_t>(j)];
    if (w.gripper.joints[j] <= lim.lo && om < 0.0) om = 0.0;
    if (w.gripper.joints[j] >= lim.hi && om > 0.0) om = 0.0;
    out.qd[j] = om;
  }
  out.v = w.object.velocity + out.setup.normal_force * (dt / w.object.mass);
  out.v = out.v * (1.0 / (1.0 + dt * pp.object_linear_damping / w.object.mass));
  out.omega = w.object.omega + dt * out.setup.normal_torque / w.object.inertia;
  out.omega /= 1.0 + dt * pp.object_angular_damping / w.object.inertia;

  solve_friction(out.setup, w.object, w.object.mass, w.object.inertia, pp.joint_inertia, &out.v,
                 &out.omega, &out.qd);
  return out;
}

// Net contact wrench about the object center for a solved substep, as momentum
// actually transferred. The implicit damping division runs after the normal
// push, so only the damped fraction of the normal impulse reaches the object;
// friction impulses land after the division and count in full. Without the
// weighting, strong opposed normals leave a phantom residual of order
// dt * damping / mass times their magnitude.
Wrench assemble_wrench(const VelocitySolve& vs, const ObjectState& obj, const PhysicsParams& pp) {
  const double dt = pp.substep_dt;
  const double lin = 1.0 / (1.0 + dt * pp.object_linear_damping / obj.mass);
  const double ang = 1.0 / (1.0 + dt * pp.object_angular_damping / obj.inertia);
  Wrench total{vs.setup.normal_force * lin, vs.setup.normal_torque * ang};
  for (int i = 0; i < vs.setup.count; ++i) {
    const FrictionRow& row = vs.setup.rows[static_cast<size_t>(i)];
    const Vec2 ft = row.tangent * (row.lambda / dt);
    total.force += ft;
    total.torque += cross(row.point - obj.position, ft);
  }
  return total;
}

bool finite(const WorldState& w) {
  if (!w.gripper.joints.all_finite() || !w.gripper.velocities.all_finite()) return false;
  if (!std::isfinite(w.object.position.x) || !std::isfinite(w.object.position.y)) return false;
  if (!std::isfinite(w.object.velocity.x) || !std::isfinite(w.object.velocity.y)) return false;
  if (!std::isfinite(w.object.heading) || !std::isfinite(w.object.omega)) return false;
  for (int i = 0; i < w.sea_count; ++i) {
    const SeaState& s = w.sea[static_cast<size_t>(i)];
    if (!std::isfinite(s.theta_motor) || !std::isfinite(s.theta_pulley)) return false;
  }
  return true;
}

}  // namespace

WorldState step_world(const WorldState& w, const JointVector& applied_joint_torques,
                      const GripperParams& gp, const PhysicsParams& pp,
                      const MaterialPair& pair, StepStats* stats, Wrench* contact_wrench) {
  const double dt = pp.substep_dt;
  WorldState next = w;

  VelocitySolve vs = solve_step_velocities(w, applied_joint_torques, gp, pp, pair);
  if (contact_wrench) *contact_wrench = assemble_wrench(vs, w.object, pp);
  ContactSetup& setup = vs.setup;
  JointVector& qd = vs.qd;
  Vec2& v = vs.v;
  double& omega = vs.omega;

  // Flag rows still sliding at the cone with the corrected velocities.
  for (int i = 0; i < setup.count; ++i) {
    FrictionRow& row = setup.rows[static_cast<size_t>(i)];
    double vt = dot(v + perp(row.point - w.object.position) * omega, row.tangent);
    for (int j = 0; j < 4; ++j) vt += qd[j] * row.jr[j];
    row.slipping = std::abs(row.lambda) >= row.cap * (1.0 - 1e-9) &&
                   std::abs(vt) >= pp.penalty.slip_velocity_threshold;
    if (stats) {
      stats->min_normal_force = std::min(stats->min_normal_force, row.fn);
      stats->max_cone_violation =
          std::max(stats->max_cone_violation, std::abs(row.lambda) / dt - pair.mu * row.fn);
    }
  }

  // Positions from the corrected velocities; joint limits as hard stops.
  for (int j = 0; j < 4; ++j) {
    double theta = w.gripper.joints[j] + dt * qd[j];
    const Range& lim = gp.limit[static_cast<size_t>(j)];
    if (theta <= lim.lo) {
      theta = lim.lo;
      qd[j] = std::max(qd[j], 0.0);
    } else if (theta >= lim.hi) {
      theta = lim.hi;
      qd[j] = std::min(qd[j], 0.0);
    }
    next.gripper.joints[j] = theta;
    next.gripper.velocities[j] = qd[j];
  }
  next.object.velocity = v;
  next.object.position = w.object.position + v * dt;
  next.object.omega = omega;
  next.object.heading = w.object.heading + dt * omega;
  next.time = w.time + dt;

  // Keep the SEA pulley encoders locked to the new joint configuration.
  for (int i = 0; i < next.sea_count; ++i) {
    next.sea[static_cast<size_t>(i)].theta_pulley =
        pulley_angle_from_joints(gp, next.gripper.joints, i);
  }

  next.contacts = detect_contacts(forward_kinematics(gp, next.gripper.joints),
                                  next.object.shape, next.object.position, next.object.heading);
  for (int k = 0; k < next.contacts.count; ++k) {
    Contact& c = next.contacts.items[static_cast<size_t>(k)];
    // Carry the stick/slip state over from the nearest old contact on the same
    // link; face manifolds put two contacts on one link, so match by point.
    double best_sq = std::numeric_limits<double>::infinity();
    for (int i = 0; i < setup.count; ++i) {
      const FrictionRow& row = setup.rows[static_cast<size_t>(i)];
      if (row.link_id != c.link_id) continue;
      const double d_sq = norm_sq(row.point - c.point);
      if (d_sq < best_sq) {
        best_sq = d_sq;
        c.slipping = row.slipping;
      }
    }
    if (stats) stats->max_penetration = std::max(stats->max_penetration, c.depth);
  }

  if (!finite(next)) throw SimDivergence("non-finite state at t=" + std::to_string(next.time));
  return next;
}

Wrench net_wrench(const WorldState& w, const JointVector& applied_joint_torques,
                  const GripperParams& gp, const PhysicsParams& pp, const MaterialPair& pair) {
  // Report the contact forces the next substep would actually apply: penalty
  // normals from the current state plus the friction impulses (as forces) from
  // the same solve the integrator runs. Sharing that solve keeps this query
  // consistent with the dynamics, so a grasp at rest sums to roughly zero.
  VelocitySolve vs = solve_step_velocities(w, applied_joint_torques, gp, pp, pair);
  return assemble_wrench(vs, w.object, pp);
}

JointVector contact_joint_torques(const WorldState& w, const JointVector& applied_joint_torques,
                                  const GripperParams& gp, const PhysicsParams& pp,
                                  const MaterialPair& pair) {
  VelocitySolve vs = solve_step_velocities(w, applied_joint_torques, gp, pp, pair);
  JointVector out = vs.setup.normal_joint_torques;
  for (int i = 0; i < vs.setup.count; ++i) {
    const FrictionRow& row = vs.setup.rows[static_cast<size_t>(i)];
    for (int j = 0; j < 4; ++j) out[j] += row.jr[j] * row.lambda / pp.substep_dt;
  }
  return out;
}

bool state_quiet(const WorldState& w, const SettleThresholds& th) {
  if (w.gripper.velocities.max_abs() >= th.joint_speed) return false;
  if (norm(w.object.velocity) >= th.object_speed) return false;
  if (std::abs(w.object.omega) >= th.object_spin) return false;
  return true;
}

bool is_settled(std::span<const WorldState> history, double window, const SettleThresholds& th) {
  if (history.empty()) return false;
  const double t_end = history.back().time;
  if (t_end - history.front().time < window) return false;
  for (auto it = history.rbegin(); it != history.rend(); ++it) {
    if (t_end - it->time > window) break;
    if (!state_quiet(*it, th)) return false;
  }
  return true;
}

}  // namespace sg
