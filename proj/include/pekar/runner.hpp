#pragma once

#include "pekar/config.hpp"

#include <ostream>
#include <string>
#include <vector>

namespace pekar {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_invalid = 2, exit_not_converged = 3 };

struct RunSummary {
  int exit_code = exit_ok;
  bool all_converged = true;
  std::vector<std::string> artifacts;  ///< file names relative to the output directory
  double wall_seconds = 0.0;
};

/// Executes the configured experiment and writes its artifacts plus
/// manifest.json into cfg.output_dir. The config must already be validated.
/// In strict mode any unconverged solve turns the exit code into 3.
RunSummary run_experiment(const ExperimentConfig& cfg, bool strict, std::ostream& log);

/// Human-readable report of validate_config and estimate.
void describe_config(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace pekar
