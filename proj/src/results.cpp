#include "seagrasp/results.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace sg {

std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

namespace {

std::string hex_hash(uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

// Empty cell for values that do not exist for this trial.
std::string opt_g9(double v, bool present) { return present ? format_g9(v) : ""; }

}  // namespace

std::string trials_csv(const SweepReport& rep) {
  std::ostringstream o;
  o << "trial_id,controller,ratio,object,object_size_mm,location_mm,initial_pose_deg,"
       "friction,mu,seed,outcome,success,diverged,touch_time_s,settle_time_s,"
       "pose_change_deg,torque_touch_nm,torque_final_nm,max_penetration_mm,"
       "max_cone_violation_n,min_normal_force_n,wrench_fx_n,wrench_fy_n,wrench_tz_nm,"
       "traj_hash\n";
  for (size_t i = 0; i < rep.results.size(); ++i) {
    const TrialSpec& s = rep.specs[i];
    const TrialResult& r = rep.results[i];
    o << i << ',' << controller_label(s) << ',' << format_g9(s.ratio) << ','
      << shape_label(s.object) << ',' << std::lround(s.object.size * 1000.0) << ','
      << std::lround(s.location.y * 1000.0) << ','
      << (s.initial_pose ? std::to_string(std::lround(rad_to_deg(*s.initial_pose))) : "") << ','
      << s.friction_label << ',' << format_g9(s.mu) << ',' << s.seed << ','
      << outcome_name(r.outcome) << ',' << (r.success ? 1 : 0) << ',' << (r.diverged ? 1 : 0)
      << ',' << opt_g9(r.touch_time, r.touch_time >= 0.0) << ','
      << opt_g9(r.settle_time, r.settle_time >= 0.0) << ','
      << opt_g9(r.pose_change_deg, std::isfinite(r.pose_change_deg)) << ','
      << format_g9(r.touch_torque) << ',' << format_g9(r.final_torque) << ','
      << format_g9(r.stats.max_penetration * 1000.0) << ','
      << format_g9(r.stats.max_cone_violation) << ',' << format_g9(r.stats.min_normal_force)
      << ',' << format_g9(r.settle_wrench.force.x) << ',' << format_g9(r.settle_wrench.force.y)
      << ',' << format_g9(r.settle_wrench.torque) << ',' << hex_hash(r.traj_hash) << '\n';
  }
  return o.str();
}

std::string aggregates_csv(const SweepReport& rep) {
  std::ostringstream o;
  o << "controller,dimension,value,subcategory,count,trials,rate\n";
  auto emit = [&](const std::string& ctrl, const std::string& dim, const std::string& val,
                  const char* sub, int count, int trials) {
    o << ctrl << ',' << dim << ',' << val << ',' << sub << ',' << count << ',' << trials << ','
      << format_g9(trials > 0 ? static_cast<double>(count) / trials : 0.0) << '\n';
  };
  for (const auto& [ctrl, dims] : rep.cells) {
    for (const auto& [dim, values] : dims) {
      for (const auto& [val, c] : values) {
        emit(ctrl, dim, val, "fingertip", c.fingertip, c.trials);
        emit(ctrl, dim, val, "enveloped", c.enveloped, c.trials);
        emit(ctrl, dim, val, "joint_limited", c.joint_limited, c.trials);
        emit(ctrl, dim, val, "any_success", c.successes(), c.trials);
      }
    }
  }
  return o.str();
}

std::string summary_csv(const SweepReport& rep) {
  std::ostringstream o;
  o << "controller,trials,successes,success_rate,mean_pose_change_deg,diverged\n";
  for (const auto& [ctrl, c] : rep.by_controller) {
    const auto it = rep.mean_pose_change.find(ctrl);
    o << ctrl << ',' << c.trials << ',' << c.successes() << ','
      << format_g9(c.trials > 0 ? static_cast<double>(c.successes()) / c.trials : 0.0) << ','
      << (it != rep.mean_pose_change.end() ? format_g9(it->second) : "") << ',' << c.diverged
      << '\n';
  }
  return o.str();
}

CsvRows parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> header;
  CsvRows rows;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (line.back() == ',') cells.push_back("");
    if (first) {
      header = cells;
      first = false;
      continue;
    }
    if (cells.size() != header.size()) {
      throw std::runtime_error("csv row width mismatch: " + line);
    }
    std::map<std::string, std::string> row;
    for (size_t i = 0; i < cells.size(); ++i) row[header[i]] = cells[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string trace_json(const TrialSpec& spec, const TrialTrace& trace) {
  nlohmann::json j;
  j["spec"] = {
      {"controller", controller_label(spec)},
      {"ratio", spec.ratio},
      {"object", shape_label(spec.object)},
      {"location_mm", spec.location.y * 1000.0},
      {"friction", spec.friction_label},
      {"mu", spec.mu},
      {"seed", spec.seed},
  };
  if (spec.initial_pose) j["spec"]["initial_pose_deg"] = rad_to_deg(*spec.initial_pose);
  nlohmann::json samples = nlohmann::json::array();
  for (const TraceSample& s : trace.samples) {
    nlohmann::json e;
    e["t"] = s.time;
    e["joints"] = {s.joints[0], s.joints[1], s.joints[2], s.joints[3]};
    e["joint_velocities"] = {s.velocities[0], s.velocities[1], s.velocities[2], s.velocities[3]};
    e["tendon_forces"] = {s.tendon_forces[0], s.tendon_forces[1], s.tendon_forces[2],
                          s.tendon_forces[3]};
    e["object"] = {{"x", s.object_position.x},
                   {"y", s.object_position.y},
                   {"heading", s.object_heading},
                   {"vx", s.object_velocity.x},
                   {"vy", s.object_velocity.y},
                   {"omega", s.object_omega}};
    e["contacts"] = s.contact_count;
    e["phase"] = s.phase;
    samples.push_back(std::move(e));
  }
  j["samples"] = std::move(samples);
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_report_files(const std::string& out_dir, const SweepReport& rep,
                        const RunConfig& cfg) {
  std::filesystem::create_directories(out_dir);
  const std::filesystem::path dir(out_dir);
  write_text_file((dir / "trials.csv").string(), trials_csv(rep));
  write_text_file((dir / "aggregates.csv").string(), aggregates_csv(rep));
  write_text_file((dir / "summary.csv").string(), summary_csv(rep));
  write_text_file((dir / "config.toml").string(), config_to_text(cfg));
}

}  // namespace sg
