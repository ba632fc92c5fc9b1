#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fokker/scenario.hpp"

namespace fokker {

struct ExperimentInfo {
  std::string name;
  std::string description;
};

const std::vector<ExperimentInfo>& experiment_catalog();

struct RunOptions {
  std::optional<std::filesystem::path> out;  // overrides the scenario's output
  std::optional<std::uint64_t> seed;         // overrides the scenario's seed
  int jobs = 1;                              // workers for parameter sweeps
};

/// Machine-readable outcome; `status` is "ok", a failed-check tag, or the
/// numerical failure class.
struct ExperimentResult {
  std::string scenario;
  std::string experiment;
  std::string status;
  std::string metric_name;
  double metric = 0.0;
  std::vector<std::filesystem::path> files;
  bool numerical_failure = false;
  std::string message;
};

/// Writes into <out>/<scenario name>/ and never throws NumericalError: those
/// are reported in the result. ConfigError propagates.
ExperimentResult run_experiment(const Scenario& sc, const RunOptions& opts = {});

/// "scenario,experiment,status,metric_name,metric"
std::string summary_line(const ExperimentResult& r);
std::string summary_header();

/// Checks the experiment name and builds both worldlines without running.
void validate_scenario(const Scenario& sc);

}  // namespace fokker
