#pragma once

#include <stdexcept>
#include <string>

#include "seagrasp/trial.hpp"

namespace sg {

// Run configuration, loaded from a small TOML-style file: [section] headers,
// key = value lines, # comments. Values are numbers, booleans, quoted strings,
// or flat numeric arrays. Unknown sections or keys are rejected with the line
// number. File-facing units are millimetres and degrees where the key says so;
// everything is converted to SI on load.

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  TrialParams trial{};
  int jobs = 1;
  int repetitions = 1;
  std::string out_dir = "results";
  bool trace = false;
};

RunConfig default_config();
RunConfig parse_config(const std::string& text, const std::string& origin);
RunConfig load_config(const std::string& path);

// Full echo of a resolved config, re-parseable by parse_config.
std::string config_to_text(const RunConfig& cfg);

}  // namespace sg
