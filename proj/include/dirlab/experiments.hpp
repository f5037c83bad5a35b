#pragma once

// Experiment recipes and the config-driven suite runner. Every recipe
// returns a report holding its parameters, the raw series it measured, the
// fitted exponents and its verdicts; verdicts can be recomputed from the
// series.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dirlab/config.hpp"

namespace dirlab {

enum class VerdictStatus { Pass, Fail, Skipped };
const char* verdict_status_name(VerdictStatus status) noexcept;

struct Verdict {
  std::string name;
  VerdictStatus status = VerdictStatus::Fail;
  double value = 0.0;
  std::string relation;  // e.g. "|value - target| <= tolerance"
  double target = 0.0;
  double tolerance = 0.0;
  std::string note;

  bool failed() const noexcept { return status == VerdictStatus::Fail; }
};

struct ExperimentReport {
  std::string id;
  std::string kind;
  nlohmann::json parameters = nlohmann::json::object();
  nlohmann::json series = nlohmann::json::object();
  nlohmann::json fits = nlohmann::json::object();
  std::vector<Verdict> verdicts;
  std::optional<std::string> error;
  std::string version;
  std::string timestamp;
  double elapsed_seconds = 0.0;

  bool pass() const noexcept;
  const Verdict* verdict(const std::string& name) const noexcept;
  // Timing fields live under "timing" so they can be dropped for comparisons.
  nlohmann::json to_json(bool include_timing = true) const;
  // Series columns of equal length as CSV; empty when there are none.
  std::string series_csv() const;
};

struct RunOptions {
  std::uint64_t seed = 20240611;
  unsigned threads = 1;
};

// Recipes with typed parameters.
ExperimentReport run_scaling_lattice(int d, double s, const std::vector<long>& q_list,
                                     double tolerance = 0.4, bool antipodal = true);
ExperimentReport run_garnett_decay(const std::vector<long>& depth_list, double eps_base = 4.0,
                                   bool antipodal = true);
ExperimentReport run_adaptable_directions(const std::string& source, int d, double s, long size,
                                          std::optional<double> constant = std::nullopt,
                                          unsigned threads = 1);

std::vector<std::string> experiment_kinds();
// Throws Parse for an unknown kind or key.
void validate_section(const ConfigSection& section);
// Never throws for experiment failures: they are recorded in the report.
ExperimentReport run_experiment(const ConfigSection& section, const RunOptions& options);

struct SuiteResult {
  std::vector<ExperimentReport> reports;
  bool all_pass = true;
  std::string summary_csv;
};

// Validates every section first, then runs them in order. With an output
// directory, writes <id>.json, <id>.csv and summary.csv there.
SuiteResult run_suite(const Config& config, const RunOptions& options,
                      const std::optional<std::string>& out_dir = std::nullopt);
SuiteResult run_all(const std::string& config_path, const RunOptions& options,
                    const std::optional<std::string>& out_dir = std::nullopt);

}  // namespace dirlab
