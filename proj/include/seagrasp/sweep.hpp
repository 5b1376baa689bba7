#pragma once

#include <map>
#include <string>
#include <vector>

#include "seagrasp/trial.hpp"

namespace sg {

// Built-in trial matrices. Per-trial seeds are the trial index plus the base
// seed, so any suite is reproducible regardless of execution order.

// Four-SEA controllers {mimo, fr-0.3, fr-0.4, fr-0.5} x 4 objects x 3 heights x
// 3 distal pre-curls x 2 frictions, plus underactuated {0.3, 0.4, 0.5} x
// 4 objects x 3 heights x 2 frictions: 288 + 72 = 360 trials.
std::vector<TrialSpec> default_sweep(uint64_t base_seed = 0);

// {mimo, fr-0.5} x {circle67, box57} x heights {60, 80} mm, high friction: 8.
std::vector<TrialSpec> enveloping_suite(uint64_t base_seed = 0);

// transition x {circle67, box57} x heights {100, 120, 140} mm x pre-curls
// {0, 30, 60} deg, low friction: 18.
std::vector<TrialSpec> transition_suite(uint64_t base_seed = 0);

struct OutcomeCounts {
  int trials = 0;
  int fingertip = 0;
  int enveloped = 0;
  int joint_limited = 0;
  int ejected = 0;
  int timeout = 0;
  int diverged = 0;

  int successes() const { return fingertip + enveloped + joint_limited; }
  void add(const TrialResult& r);
};

// Aggregate cell values for one trial, e.g. {"object", "circle67"}.
struct DimensionValue {
  std::string dimension;
  std::string value;
};
std::vector<DimensionValue> trial_dimensions(const TrialSpec& spec);

struct SweepReport {
  std::vector<TrialSpec> specs;
  std::vector<TrialResult> results;  // index-aligned with specs
  std::map<std::string, OutcomeCounts> by_controller;
  // controller -> dimension -> value -> counts; includes dimension "overall"
  // with the single value "all".
  std::map<std::string, std::map<std::string, std::map<std::string, OutcomeCounts>>> cells;
  // controller -> mean pose change over successful joint-observable trials, deg.
  std::map<std::string, double> mean_pose_change;

  int diverged_count() const;
};

void aggregate(SweepReport& rep);

// Runs every spec; a trial that throws is recorded as a diverged failure and
// the suite continues. jobs > 1 runs trials concurrently; the report is
// index-keyed so the output is identical for any job count.
SweepReport run_suite(const std::vector<TrialSpec>& specs, const TrialParams& params,
                      int jobs = 1);

}  // namespace sg
