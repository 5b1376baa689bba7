#pragma once

#include <map>
#include <string>
#include <vector>

#include "seagrasp/config.hpp"
#include "seagrasp/sweep.hpp"

namespace sg {

// Result serialization. CSV files carry a header row, UTF-8 text, dot decimal
// separator; floating-point fields are printed with %.9g and re-print stably
// after a parse round trip. Unavailable fields (e.g. pose change without joint
// sensing) are left empty.

std::string format_g9(double v);

std::string trials_csv(const SweepReport& rep);
std::string aggregates_csv(const SweepReport& rep);
std::string summary_csv(const SweepReport& rep);

// Rows keyed by header name, cells as raw strings.
using CsvRows = std::vector<std::map<std::string, std::string>>;
CsvRows parse_csv(const std::string& text);

std::string trace_json(const TrialSpec& spec, const TrialTrace& trace);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// trials.csv, aggregates.csv, summary.csv, and config.toml under out_dir,
// which is created if missing.
void write_report_files(const std::string& out_dir, const SweepReport& rep,
                        const RunConfig& cfg);

}  // namespace sg
