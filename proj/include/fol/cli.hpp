#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

#include "fol/transport.hpp"

namespace fol::cli {

using json = nlohmann::json;

/// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

/// CSV with header `x,weight` (circle) or `x,y,weight` (torus). Points are
/// wrapped into [0,1). Weights are renormalized, with a warning on `warn`
/// when the raw sum is off by more than 1e-6.
DiscreteMeasure read_measure_csv(const std::filesystem::path& path, std::ostream* warn = nullptr);
DiscreteMeasure parse_measure_csv(const std::string& text, std::ostream* warn = nullptr);
std::string measure_csv(const DiscreteMeasure& mu);

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::string experiment;
  json config;
  json constants;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  json summary;
  std::vector<Check> checks;

  bool passed() const;
};

const std::vector<std::string>& experiment_ids();

/// Fills defaults and validates ranges; ConfigError on unknown keys, wrong
/// types or out-of-range values.
json normalize_config(const std::string& experiment, const json& raw);

/// Runs a normalized config.
ExperimentResult run_experiment(const std::string& experiment, const json& config);

std::string results_csv(const ExperimentResult& result);

/// results.csv, report.json and constants.json under out_dir, each written atomically.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir, double wall_seconds);

}  // namespace fol::cli
