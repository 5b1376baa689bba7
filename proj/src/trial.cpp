#include "seagrasp/trial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sg {

const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::FingertipStable: return "fingertip_stable";
    case Outcome::Enveloped: return "enveloped";
    case Outcome::JointLimited: return "joint_limited";
    case Outcome::Ejected: return "ejected";
    case Outcome::Timeout: return "timeout";
  }
  return "unknown";
}

bool outcome_success(Outcome o) {
  return o == Outcome::FingertipStable || o == Outcome::Enveloped ||
         o == Outcome::JointLimited;
}

std::string controller_label(const TrialSpec& spec) {
  char buf[32];
  switch (spec.controller) {
    case ControllerKind::Mimo: return "mimo";
    case ControllerKind::Transition: return "transition";
    case ControllerKind::FixedRatio:
      std::snprintf(buf, sizeof(buf), "fr-%.1f", spec.ratio);
      return buf;
    case ControllerKind::PhysUA:
      std::snprintf(buf, sizeof(buf), "ua-%.1f", spec.ratio);
      return buf;
  }
  return "unknown";
}

double friction_mu(const std::string& label) {
  if (label == "rubber") return 1.2;
  if (label == "vinyl") return 0.4;
  throw std::invalid_argument("unknown friction label: " + label);
}

void TrialParams::validate() const {
  gripper.validate();
  sea.validate();
  physics.validate();
  if (!(control_dt > 0.0)) throw std::invalid_argument("control_dt must be positive");
  const double ratio = control_dt / physics.substep_dt;
  if (std::abs(ratio - std::lround(ratio)) > 1e-9 || std::lround(ratio) < 1) {
    throw std::invalid_argument("control_dt must be an integer multiple of substep_dt");
  }
  if (!(timeout > 0.0)) throw std::invalid_argument("timeout must be positive");
  if (!(settle_window > 0.0)) throw std::invalid_argument("settle window must be positive");
  if (!workspace_x.valid() || !workspace_y.valid()) {
    throw std::invalid_argument("workspace band is empty");
  }
  for (int j = 0; j < 4; ++j) {
    if (!(torque_maxima[j] >= 0.0)) throw std::invalid_argument("torque maxima must be >= 0");
  }
  if (!(approach.torque > 0.0)) throw std::invalid_argument("approach torque must be positive");
  if (!(approach.ramp_time >= 0.0)) throw std::invalid_argument("approach ramp must be >= 0");
  if (!(transition_ratio > 0.0)) throw std::invalid_argument("transition ratio must be positive");
  if (!(transition_proximal_torque > 0.0)) {
    throw std::invalid_argument("transition proximal torque must be positive");
  }
  if (!(transition_ramp_rate > 0.0)) {
    throw std::invalid_argument("transition ramp rate must be positive");
  }
  if (!(noise.angle_std >= 0.0) || !(noise.torque_std >= 0.0)) {
    throw std::invalid_argument("noise levels must be >= 0");
  }
}

namespace {

double observable_torque_magnitude(const FeedbackVector& y) {
  if (y.full_torques_available()) return y.measured_torques().norm();
  const double t1 = y.proximal_torque(0);
  const double t2 = y.proximal_torque(1);
  return std::sqrt(t1 * t1 + t2 * t2);
}

enum class Phase { Approach, Squeeze };

}  // namespace

TrialResult run_trial(const TrialSpec& spec, const TrialParams& params, TrialTrace* trace) {
  params.validate();
  spec.object.validate();
  if (!(spec.mu >= 0.0)) throw std::invalid_argument("friction must be non-negative");

  GripperParams gp = params.gripper;
  if (spec.controller == ControllerKind::PhysUA) {
    if (!(spec.ratio > 0.0)) throw std::invalid_argument("torque ratio must be positive");
    gp.transmission = Transmission{TransmissionKind::Underactuated, spec.ratio};
  } else {
    gp.transmission = Transmission{TransmissionKind::FullyActuated, 0.5};
    if (spec.controller == ControllerKind::FixedRatio && !(spec.ratio > 0.0)) {
      throw std::invalid_argument("torque ratio must be positive");
    }
  }
  gp.validate();

  const bool joint_observable = gp.transmission.kind == TransmissionKind::FullyActuated;
  if (!joint_observable && spec.initial_pose.has_value()) {
    throw std::invalid_argument("initial distal pose needs a joint-observable transmission");
  }
  const double pose = spec.initial_pose.value_or(0.0);
  if (!gp.limit[kDistal1].contains(pose)) {
    throw std::invalid_argument("initial distal pose outside joint travel");
  }

  const JointVector q0{{gp.limit[kProximal1].lo, pose, gp.limit[kProximal2].lo, pose}};
  WorldState w = make_initial_world(
      gp, q0, make_object(spec.object, spec.location, params.physics.object_mass));
  for (const Contact& c : w.contacts) {
    if (c.depth > 1e-4) throw std::invalid_argument("object placement intersects the gripper");
  }

  const MaterialPair pair{spec.mu};
  const int substeps = static_cast<int>(std::lround(params.control_dt / params.physics.substep_dt));
  const int max_ticks = static_cast<int>(std::lround(params.timeout / params.control_dt));

  const MimoParams mimo{build_gain_matrices(params.gains), params.integrator_clamp};
  ControllerState ctrl{};
  ReferenceVector ref{};
  JointVector touch_angles{};
  TouchDetector touch(params.approach.touch, params.approach.ramp_time);
  SplitMix64 rng(spec.seed);
  const bool noisy = params.noise.angle_std > 0.0 || params.noise.torque_std > 0.0;
  const bool runs_mimo = spec.controller == ControllerKind::Mimo ||
                         spec.controller == ControllerKind::Transition;

  // Approach: proximal drives close in torque mode while distal drives (when
  // separately actuated) hold the pre-shaped pulley position.
  if (joint_observable) {
    set_mode(w.sea[kProximal1], ControlMode::Torque, 0.0);
    set_mode(w.sea[kProximal2], ControlMode::Torque, 0.0);
    set_mode(w.sea[kDistal1], ControlMode::PulleyPosition, w.sea[kDistal1].theta_pulley);
    set_mode(w.sea[kDistal2], ControlMode::PulleyPosition, w.sea[kDistal2].theta_pulley);
  } else {
    set_mode(w.sea[0], ControlMode::Torque, 0.0);
    set_mode(w.sea[1], ControlMode::Torque, 0.0);
  }

  auto enter_fixed_ratio = [&](double proximal_ref, double ratio) {
    if (joint_observable) {
      const JointVector tq = fixed_ratio_setpoints(proximal_ref, ratio);
      for (int i = 0; i < 4; ++i) {
        set_mode(w.sea[i], ControlMode::Torque, sea_torque_setpoint(gp, params.sea, tq[i]));
      }
    } else {
      const double sp = sea_torque_setpoint(gp, params.sea, proximal_ref);
      set_mode(w.sea[0], ControlMode::Torque, sp);
      set_mode(w.sea[1], ControlMode::Torque, sp);
    }
  };

  Phase phase = Phase::Approach;
  int squeeze_stage = 0;  // 1 after touch, 2 after the transition ratio switch
  double transition_start = 0.0;
  std::array<double, 2> prev_gate{};
  bool have_prev = false;

  SettleMonitor monitor{params.settle_window};
  Fnv1a hash;
  TrialResult res;
  std::array<double, 4> forces{};
  // Ring of per-tick mean contact wrenches covering one settle window. The
  // reported settle wrench is their average: slow creep cycles span several
  // ticks, and only a window-long mean cancels them the way the motion does.
  const int wrench_ring_len = std::max(1, (int)std::lround(params.settle_window / params.control_dt));
  std::vector<Wrench> wrench_ring((size_t)wrench_ring_len);
  int wrench_count = 0;

  try {
    for (int tick = 0; tick < max_ticks; ++tick) {
      FeedbackVector y = observable_feedback(gp, w.seas(), params.sea);
      if (noisy) {
        JointVector da, dt;
        for (int j = 0; j < 4; ++j) da[j] = rng.normal() * params.noise.angle_std;
        for (int j = 0; j < 4; ++j) dt[j] = rng.normal() * params.noise.torque_std;
        y.perturb(da, dt);
      }

      if (phase == Phase::Approach) {
        const double tau = approach_torque(w.time, params.approach);
        const double sp = sea_torque_setpoint(gp, params.sea, tau);
        if (joint_observable) {
          w.sea[kProximal1].setpoint = sp;
          w.sea[kProximal2].setpoint = sp;
        } else {
          w.sea[0].setpoint = sp;
          w.sea[1].setpoint = sp;
        }

        for (int f = 0; f < 2; ++f) {
          const double tq = y.proximal_torque(f);
          double gate_pos, baseline, speed;
          if (joint_observable) {
            const int pj = proximal_joint_of(f);
            gate_pos = y.measured_angles()[pj];
            speed = have_prev ? (gate_pos - prev_gate[f]) / params.control_dt : 0.0;
            baseline = free_motion_torque_baseline(gp.spring[pj], gate_pos, speed,
                                                   params.physics.joint_damping,
                                                   params.approach.touch);
          } else {
            // No joint sensing here: gate the stall on the composite pulley and
            // budget a nominal mid-travel spring load into the baseline.
            gate_pos = w.sea[f].theta_pulley;
            speed = have_prev ? (gate_pos - prev_gate[f]) / params.control_dt : 0.0;
            baseline = params.approach.touch.baseline_floor +
                       gp.spring[proximal_joint_of(f)].stiffness * 1.0 +
                       params.physics.joint_damping * std::abs(speed);
          }
          touch.update_finger(f, tq, baseline, speed, w.time);
          prev_gate[f] = gate_pos;
        }
        have_prev = true;

        if (touch.touched()) {
          res.touch_time = w.time;
          res.touch_torque = observable_torque_magnitude(y);
          phase = Phase::Squeeze;
          squeeze_stage = 1;
          if (runs_mimo) {
            touch_angles = y.measured_angles();
            ref = make_reference(touch_angles, params.torque_maxima);
            ctrl = ControllerState{};
            for (int i = 0; i < 4; ++i) {
              set_mode(w.sea[i], ControlMode::MotorPosition, w.sea[i].theta_motor);
            }
          } else {
            enter_fixed_ratio(params.torque_maxima[kProximal1], spec.ratio);
          }
        }
      }

      if (phase == Phase::Squeeze && runs_mimo && squeeze_stage == 1) {
        const JointVector c = mimo_step(ref, y, ctrl, mimo, params.control_dt);
        for (int i = 0; i < 4; ++i) w.sea[i].setpoint = sea_position_command(c[i]);
      }

      MotionPeak peak;
      Wrench tick_sum;
      for (int k = 0; k < substeps; ++k) {
        auto seas = w.seas();
        for (size_t i = 0; i < seas.size(); ++i) {
          const double cmd = mode_step(seas[i], params.sea);
          seas[i] = step_motor(cmd, seas[i], params.sea, params.physics.substep_dt);
          forces[i] = tendon_force(seas[i], params.sea).newtons;
        }
        const TorqueBreakdown tb =
            joint_torque_breakdown(gp, w.gripper.joints, {forces.data(), seas.size()});
        Wrench cw;
        w = step_world(w, tb.net, gp, params.physics, pair, &res.stats, &cw);
        peak.absorb(w);
        tick_sum.force += cw.force;
        tick_sum.torque += cw.torque;
      }
      Wrench& slot = wrench_ring[(size_t)(wrench_count % wrench_ring_len)];
      slot.force = tick_sum.force * (1.0 / substeps);
      slot.torque = tick_sum.torque / substeps;
      ++wrench_count;

      hash.add(w.time);
      for (int j = 0; j < 4; ++j) hash.add(w.gripper.joints[j]);
      for (int j = 0; j < 4; ++j) hash.add(w.gripper.velocities[j]);
      hash.add(w.object.position.x);
      hash.add(w.object.position.y);
      hash.add(w.object.heading);
      hash.add(w.object.velocity.x);
      hash.add(w.object.velocity.y);
      hash.add(w.object.omega);

      if (trace) {
        TraceSample s;
        s.time = w.time;
        s.joints = w.gripper.joints;
        s.velocities = w.gripper.velocities;
        s.tendon_forces = forces;
        s.object_position = w.object.position;
        s.object_heading = w.object.heading;
        s.object_velocity = w.object.velocity;
        s.object_omega = w.object.omega;
        s.contact_count = static_cast<int>(w.contacts.count);
        s.phase = phase == Phase::Approach ? 0 : squeeze_stage;
        trace->samples.push_back(s);
      }

      // A transitioned grasp ramps the fixed-ratio squeeze up from a gentle
      // start instead of stepping straight to the ceiling: a torque step at
      // the handover shoots the object sideways off the fingertips before the
      // distal links can wrap it. Settling only counts once the ramp is done.
      bool transition_ramping = false;
      if (phase == Phase::Squeeze && squeeze_stage == 2) {
        // The ramp tops out where either joint would exceed its torque rating:
        // with ratio > 0.5 the distal joints are the binding constraint.
        const double ceiling =
            std::min(params.torque_maxima[kProximal1],
                     params.torque_maxima[kDistal1] / params.transition_ratio);
        const double ref =
            std::min(ceiling, params.transition_proximal_torque +
                                  params.transition_ramp_rate * (w.time - transition_start));
        enter_fixed_ratio(ref, params.transition_ratio);
        transition_ramping = ref < ceiling;
      }

      if (phase == Phase::Squeeze && !transition_ramping &&
          monitor.update(w.time, peak, params.settle)) {
        if (spec.controller == ControllerKind::Transition && squeeze_stage == 1) {
          enter_fixed_ratio(params.transition_proximal_torque, params.transition_ratio);
          monitor.reset();
          squeeze_stage = 2;
          transition_start = w.time;
        } else {
          res.settled = true;
          res.settle_time = w.time;
          break;
        }
      }
    }
  } catch (const SimDivergence&) {
    res.diverged = true;
  }

  res.traj_hash = hash.value();
  res.final_world = w;
  if (wrench_count > 0) {
    const int n = std::min(wrench_count, wrench_ring_len);
    Wrench mean;
    for (int i = 0; i < n; ++i) {
      mean.force += wrench_ring[(size_t)i].force;
      mean.torque += wrench_ring[(size_t)i].torque;
    }
    mean.force = mean.force * (1.0 / n);
    mean.torque /= n;
    res.settle_wrench = mean;
  }

  const FeedbackVector yf = observable_feedback(gp, w.seas(), params.sea);
  res.final_torque = observable_torque_magnitude(yf);
  if (joint_observable && res.touch_time >= 0.0) {
    double acc = 0.0;
    for (int j = 0; j < 4; ++j) {
      const double d = rad_to_deg(yf.measured_angles()[j] - touch_angles[j]);
      acc += d * d;
    }
    res.pose_change_deg = std::sqrt(acc);
  } else {
    res.pose_change_deg = std::numeric_limits<double>::quiet_NaN();
  }

  if (res.diverged) {
    res.outcome = Outcome::Timeout;
    res.success = false;
    return res;
  }

  bool finger_contact[2] = {false, false};
  bool proximal_contact = false;
  for (const Contact& c : w.contacts) {
    finger_contact[c.link_id / 2] = true;
    if (is_proximal_joint(c.link_id)) proximal_contact = true;
  }
  const bool in_band = params.workspace_x.contains(w.object.position.x) &&
                       params.workspace_y.contains(w.object.position.y);

  if (!in_band || !finger_contact[0] || !finger_contact[1]) {
    res.outcome = Outcome::Ejected;
  } else if (!res.settled) {
    res.outcome = Outcome::Timeout;
  } else if (proximal_contact) {
    res.outcome = Outcome::Enveloped;
  } else {
    std::array<double, 4> ff{};
    auto seas = w.seas();
    for (size_t i = 0; i < seas.size(); ++i) ff[i] = tendon_force(seas[i], params.sea).newtons;
    const TorqueBreakdown tb =
        joint_torque_breakdown(gp, w.gripper.joints, {ff.data(), seas.size()});
    // A joint counts as pinned when the load its stop holds (actuation plus
    // contact reactions) presses it outward; actuation alone misses joints that
    // the object itself forces against a stop.
    const JointVector load =
        tb.net + contact_joint_torques(w, tb.net, gp, params.physics, pair);
    const double margin = deg_to_rad(0.5);
    bool limited = false;
    for (int j = 0; j < 4; ++j) {
      const double th = w.gripper.joints[j];
      if (th >= gp.limit[j].hi - margin && load[j] > 0.0) limited = true;
      if (th <= gp.limit[j].lo + margin && load[j] < 0.0) limited = true;
    }
    res.outcome = limited ? Outcome::JointLimited : Outcome::FingertipStable;
  }
  res.success = outcome_success(res.outcome);
  return res;
}

}  // namespace sg
