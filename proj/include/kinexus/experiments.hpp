#pragma once

#include <string>

#include "kinexus/config.hpp"

namespace kinexus::cli {

/// Runs the configured experiment and writes its CSV/JSON artifacts into
/// config.output_dir. Returns the process exit code: 0 on success, 3 when a
/// solver reports non-convergence (outputs are still written). Hard errors
/// propagate as exceptions.
int run_experiment(const RunConfig& config);

/// Re-validates the invariants of a finished run from its written outputs.
/// Prints one line per check; returns 0 when everything passes, 4 otherwise.
int check_run(const std::string& run_dir);

}  // namespace kinexus::cli
