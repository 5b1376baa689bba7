#include "seagrasp/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace sg {

namespace {

[[noreturn]] void fail(const std::string& origin, int line, const std::string& msg) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + msg);
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Cuts a trailing comment, respecting double-quoted strings.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

// One key = value occurrence plus enough context for good error messages.
struct Entry {
  const std::string& origin;
  int line;
  std::string section;
  std::string key;
  std::string value;

  [[noreturn]] void bad(const std::string& what) const {
    fail(origin, line, what + " for '" + section + "." + key + "'");
  }

  double num() const {
    try {
      size_t pos = 0;
      const double v = std::stod(value, &pos);
      if (pos != value.size()) bad("trailing characters");
      if (!std::isfinite(v)) bad("non-finite number");
      return v;
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      bad("expected a number, got '" + value + "'");
    }
  }

  int integer() const {
    const double v = num();
    if (v != std::floor(v)) bad("expected an integer");
    return static_cast<int>(v);
  }

  bool flag() const {
    if (value == "true") return true;
    if (value == "false") return false;
    bad("expected true or false");
  }

  std::string str() const {
    if (value.size() < 2 || value.front() != '"' || value.back() != '"') {
      bad("expected a quoted string");
    }
    return value.substr(1, value.size() - 2);
  }

  std::vector<double> arr(size_t n) const {
    if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
      bad("expected an array");
    }
    std::vector<double> out;
    std::string body = value.substr(1, value.size() - 2);
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) bad("empty array element");
      try {
        size_t pos = 0;
        const double v = std::stod(item, &pos);
        if (pos != item.size()) bad("bad array element '" + item + "'");
        out.push_back(v);
      } catch (const ConfigError&) {
        throw;
      } catch (const std::exception&) {
        bad("bad array element '" + item + "'");
      }
    }
    if (out.size() != n) {
      bad("expected " + std::to_string(n) + " elements, got " + std::to_string(out.size()));
    }
    return out;
  }

  Range range_of(double scale) const {
    const std::vector<double> v = arr(2);
    return Range{v[0] * scale, v[1] * scale};
  }
};

void apply_entry(RunConfig& cfg, double& gripper_spring_k, const Entry& e) {
  TrialParams& t = cfg.trial;
  const std::string& s = e.section;
  const std::string& k = e.key;

  if (s == "gripper") {
    if (k == "proximal_length_mm") t.gripper.proximal_length = e.num() / 1000.0;
    else if (k == "distal_length_mm") t.gripper.distal_length = e.num() / 1000.0;
    else if (k == "link_radius_mm") t.gripper.link_radius = e.num() / 1000.0;
    else if (k == "base_separation_mm") {
      const double half = e.num() / 2000.0;
      t.gripper.base = {Vec2{-half, 0.0}, Vec2{half, 0.0}};
    } else if (k == "joint_pulley_radius_mm") t.gripper.joint_pulley_radius = e.num() / 1000.0;
    else if (k == "spring_stiffness_nm_per_rad") gripper_spring_k = e.num();
    else if (k == "proximal_limits_deg") {
      t.gripper.limit[kProximal1] = t.gripper.limit[kProximal2] = e.range_of(kPi / 180.0);
    } else if (k == "distal_limits_deg") {
      t.gripper.limit[kDistal1] = t.gripper.limit[kDistal2] = e.range_of(kPi / 180.0);
    } else e.bad("unknown key");
  } else if (s == "sea") {
    if (k == "spring_stiffness_nm_per_rad") t.sea.spring_stiffness = e.num();
    else if (k == "pulley_radius_mm") t.sea.pulley_radius = e.num() / 1000.0;
    else if (k == "motor_max_speed_rad_s") t.sea.motor_max_speed = e.num();
    else if (k == "motor_angle_range_rad") t.sea.motor_angle_range = e.range_of(1.0);
    else if (k == "pulley_position_gain") t.sea.pulley_position_gain = e.num();
    else e.bad("unknown key");
  } else if (s == "physics") {
    if (k == "substep_dt_s") t.physics.substep_dt = e.num();
    else if (k == "control_rate_hz") t.control_dt = 1.0 / e.num();
    else if (k == "contact_stiffness_n_per_m") t.physics.penalty.normal_stiffness = e.num();
    else if (k == "contact_damping_n_s_per_m") t.physics.penalty.normal_damping = e.num();
    else if (k == "slip_velocity_threshold_m_s") t.physics.penalty.slip_velocity_threshold = e.num();
    else if (k == "joint_inertia_kg_m2") t.physics.joint_inertia = e.num();
    else if (k == "joint_damping_nm_s_per_rad") t.physics.joint_damping = e.num();
    else if (k == "object_mass_kg") t.physics.object_mass = e.num();
    else if (k == "object_linear_damping_n_s_per_m") t.physics.object_linear_damping = e.num();
    else if (k == "object_angular_damping_nm_s") t.physics.object_angular_damping = e.num();
    else e.bad("unknown key");
  } else if (s == "controller") {
    if (k == "b") {
      const std::vector<double> v = e.arr(6);
      for (size_t i = 0; i < 6; ++i) t.gains.b[i] = v[i];
    } else if (k == "w") {
      const std::vector<double> v = e.arr(4);
      for (size_t i = 0; i < 4; ++i) t.gains.w[i] = v[i];
    } else if (k == "max_torque_proximal_nm") {
      t.torque_maxima[kProximal1] = t.torque_maxima[kProximal2] = e.num();
    } else if (k == "max_torque_distal_nm") {
      t.torque_maxima[kDistal1] = t.torque_maxima[kDistal2] = e.num();
    } else if (k == "integrator_clamp_rad") t.integrator_clamp = e.num();
    else if (k == "transition_ratio") t.transition_ratio = e.num();
    else if (k == "transition_proximal_torque_nm") t.transition_proximal_torque = e.num();
    else if (k == "transition_ramp_rate_nm_s") t.transition_ramp_rate = e.num();
    else e.bad("unknown key");
  } else if (s == "approach") {
    if (k == "torque_nm") t.approach.torque = e.num();
    else if (k == "ramp_s") t.approach.ramp_time = e.num();
    else if (k == "touch_torque_factor") t.approach.touch.torque_factor = e.num();
    else if (k == "touch_speed_deg_s") t.approach.touch.speed_threshold = deg_to_rad(e.num());
    else if (k == "touch_dwell_s") t.approach.touch.dwell = e.num();
    else if (k == "baseline_floor_nm") t.approach.touch.baseline_floor = e.num();
    else e.bad("unknown key");
  } else if (s == "settle") {
    if (k == "joint_speed_deg_s") t.settle.joint_speed = deg_to_rad(e.num());
    else if (k == "object_speed_mm_s") t.settle.object_speed = e.num() / 1000.0;
    else if (k == "object_spin_deg_s") t.settle.object_spin = deg_to_rad(e.num());
    else if (k == "window_s") t.settle_window = e.num();
    else e.bad("unknown key");
  } else if (s == "trial") {
    if (k == "timeout_s") t.timeout = e.num();
    else if (k == "workspace_x_mm") t.workspace_x = e.range_of(1e-3);
    else if (k == "workspace_y_mm") t.workspace_y = e.range_of(1e-3);
    else e.bad("unknown key");
  } else if (s == "noise") {
    if (k == "angle_std_deg") t.noise.angle_std = deg_to_rad(e.num());
    else if (k == "torque_std_nm") t.noise.torque_std = e.num();
    else e.bad("unknown key");
  } else if (s == "sweep") {
    if (k == "repetitions") cfg.repetitions = e.integer();
    else if (k == "jobs") cfg.jobs = e.integer();
    else e.bad("unknown key");
  } else if (s == "output") {
    if (k == "dir") cfg.out_dir = e.str();
    else if (k == "trace") cfg.trace = e.flag();
    else e.bad("unknown key");
  } else {
    fail(e.origin, e.line, "unknown section '" + s + "'");
  }
}

}  // namespace

RunConfig default_config() { return RunConfig{}; }

RunConfig parse_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  double gripper_spring_k = cfg.trial.gripper.spring[0].stiffness;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) fail(origin, line_no, "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const size_t eq = line.find('=');
    if (eq == std::string::npos) fail(origin, line_no, "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail(origin, line_no, "expected 'key = value'");
    if (section.empty()) fail(origin, line_no, "key '" + key + "' outside any section");
    apply_entry(cfg, gripper_spring_k, Entry{origin, line_no, section, key, value});
  }

  // Restoring springs rest against the lower travel stop.
  for (int j = 0; j < 4; ++j) {
    cfg.trial.gripper.spring[j] = RestoringSpring{gripper_spring_k, cfg.trial.gripper.limit[j].lo};
  }
  if (cfg.repetitions < 1) throw ConfigError(origin + ": sweep.repetitions must be >= 1");
  if (cfg.jobs < 1) throw ConfigError(origin + ": sweep.jobs must be >= 1");
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string pair_text(double lo, double hi) { return "[" + g9(lo) + ", " + g9(hi) + "]"; }

}  // namespace

std::string config_to_text(const RunConfig& cfg) {
  const TrialParams& t = cfg.trial;
  std::ostringstream o;
  o << "[gripper]\n"
    << "proximal_length_mm = " << g9(t.gripper.proximal_length * 1000.0) << "\n"
    << "distal_length_mm = " << g9(t.gripper.distal_length * 1000.0) << "\n"
    << "link_radius_mm = " << g9(t.gripper.link_radius * 1000.0) << "\n"
    << "base_separation_mm = " << g9((t.gripper.base[1].x - t.gripper.base[0].x) * 1000.0) << "\n"
    << "joint_pulley_radius_mm = " << g9(t.gripper.joint_pulley_radius * 1000.0) << "\n"
    << "spring_stiffness_nm_per_rad = " << g9(t.gripper.spring[0].stiffness) << "\n"
    << "proximal_limits_deg = "
    << pair_text(rad_to_deg(t.gripper.limit[kProximal1].lo), rad_to_deg(t.gripper.limit[kProximal1].hi))
    << "\n"
    << "distal_limits_deg = "
    << pair_text(rad_to_deg(t.gripper.limit[kDistal1].lo), rad_to_deg(t.gripper.limit[kDistal1].hi))
    << "\n\n";
  o << "[sea]\n"
    << "spring_stiffness_nm_per_rad = " << g9(t.sea.spring_stiffness) << "\n"
    << "pulley_radius_mm = " << g9(t.sea.pulley_radius * 1000.0) << "\n"
    << "motor_max_speed_rad_s = " << g9(t.sea.motor_max_speed) << "\n"
    << "motor_angle_range_rad = " << pair_text(t.sea.motor_angle_range.lo, t.sea.motor_angle_range.hi)
    << "\n"
    << "pulley_position_gain = " << g9(t.sea.pulley_position_gain) << "\n\n";
  o << "[physics]\n"
    << "substep_dt_s = " << g9(t.physics.substep_dt) << "\n"
    << "control_rate_hz = " << g9(1.0 / t.control_dt) << "\n"
    << "contact_stiffness_n_per_m = " << g9(t.physics.penalty.normal_stiffness) << "\n"
    << "contact_damping_n_s_per_m = " << g9(t.physics.penalty.normal_damping) << "\n"
    << "slip_velocity_threshold_m_s = " << g9(t.physics.penalty.slip_velocity_threshold) << "\n"
    << "joint_inertia_kg_m2 = " << g9(t.physics.joint_inertia) << "\n"
    << "joint_damping_nm_s_per_rad = " << g9(t.physics.joint_damping) << "\n"
    << "object_mass_kg = " << g9(t.physics.object_mass) << "\n"
    << "object_linear_damping_n_s_per_m = " << g9(t.physics.object_linear_damping) << "\n"
    << "object_angular_damping_nm_s = " << g9(t.physics.object_angular_damping) << "\n\n";
  o << "[controller]\n"
    << "b = [" << g9(t.gains.b[0]);
  for (size_t i = 1; i < 6; ++i) o << ", " << g9(t.gains.b[i]);
  o << "]\n"
    << "w = [" << g9(t.gains.w[0]);
  for (size_t i = 1; i < 4; ++i) o << ", " << g9(t.gains.w[i]);
  o << "]\n"
    << "max_torque_proximal_nm = " << g9(t.torque_maxima[kProximal1]) << "\n"
    << "max_torque_distal_nm = " << g9(t.torque_maxima[kDistal1]) << "\n"
    << "integrator_clamp_rad = " << g9(t.integrator_clamp) << "\n"
    << "transition_ratio = " << g9(t.transition_ratio) << "\n"
    << "transition_proximal_torque_nm = " << g9(t.transition_proximal_torque) << "\n"
    << "transition_ramp_rate_nm_s = " << g9(t.transition_ramp_rate) << "\n\n";
  o << "[approach]\n"
    << "torque_nm = " << g9(t.approach.torque) << "\n"
    << "ramp_s = " << g9(t.approach.ramp_time) << "\n"
    << "touch_torque_factor = " << g9(t.approach.touch.torque_factor) << "\n"
    << "touch_speed_deg_s = " << g9(rad_to_deg(t.approach.touch.speed_threshold)) << "\n"
    << "touch_dwell_s = " << g9(t.approach.touch.dwell) << "\n"
    << "baseline_floor_nm = " << g9(t.approach.touch.baseline_floor) << "\n\n";
  o << "[settle]\n"
    << "joint_speed_deg_s = " << g9(rad_to_deg(t.settle.joint_speed)) << "\n"
    << "object_speed_mm_s = " << g9(t.settle.object_speed * 1000.0) << "\n"
    << "object_spin_deg_s = " << g9(rad_to_deg(t.settle.object_spin)) << "\n"
    << "window_s = " << g9(t.settle_window) << "\n\n";
  o << "[trial]\n"
    << "timeout_s = " << g9(t.timeout) << "\n"
    << "workspace_x_mm = " << pair_text(t.workspace_x.lo * 1000.0, t.workspace_x.hi * 1000.0) << "\n"
    << "workspace_y_mm = " << pair_text(t.workspace_y.lo * 1000.0, t.workspace_y.hi * 1000.0) << "\n\n";
  o << "[noise]\n"
    << "angle_std_deg = " << g9(rad_to_deg(t.noise.angle_std)) << "\n"
    << "torque_std_nm = " << g9(t.noise.torque_std) << "\n\n";
  o << "[sweep]\n"
    << "repetitions = " << cfg.repetitions << "\n"
    << "jobs = " << cfg.jobs << "\n\n";
  o << "[output]\n"
    << "dir = \"" << cfg.out_dir << "\"\n"
    << "trace = " << (cfg.trace ? "true" : "false") << "\n";
  return o.str();
}

}  // namespace sg
