#pragma once

#include <string>
#include <vector>

#include "kinexus/grid.hpp"

namespace kinexus::cli {

enum class ExperimentKind { Transient, DiracDemo, BgpConstant, BgpGeneral, Perturbation };

const char* to_string(ExperimentKind kind);
ExperimentKind experiment_from_string(const std::string& name);

/// Fully deterministic run description. Defaults (Transient) reproduce the
/// reference parameter set alpha0 = 0.0849, n = 0.3, theta = 0.5, k = 0.05,
/// r = 0.06 on a 1001-node log mesh with 400 steps to T = 200.
struct RunConfig {
  ExperimentKind experiment = ExperimentKind::Transient;

  // mesh
  Spacing spacing = Spacing::Logarithmic;
  double z_min = 1e-3;
  double z_max = 3e5;
  int n_nodes = 1001;

  // time
  double t_final = 200.0;
  int n_steps = 400;

  // model
  double alpha0 = 0.0849;
  double n = 0.3;
  double beta = 0.0;
  double r = 0.06;
  double theta = 0.5;
  double k = 0.05;

  // solver
  double tol = 1e-6;
  int max_iter = 100;
  double relaxation = 1.0;

  // perturbation preset
  double perturb_amplitude = 0.1;
  double perturb_freq = 25.0;
  double perturb_window_lo = 0.1;
  double perturb_window_hi = 1.0;

  // general-sigma balanced-growth preset (step rule)
  double sigma_x0 = 0.5;
  double sigma_low = 0.5;
  double k_anchor = 0.05;

  // output
  std::string output_dir = "out";
  int max_snapshots = 50;
  bool gnuplot = false;
};

/// Preset defaults for each experiment.
RunConfig preset(ExperimentKind kind);

/// Preset -> config file -> command-line overrides ("key=value"), then
/// validation. Unknown keys and malformed values raise ConfigError.
RunConfig parse_config(ExperimentKind kind, const std::string& config_file,
                       const std::vector<std::string>& overrides);

/// Range and stability validation; throws ConfigError.
void validate(const RunConfig& config);

}  // namespace kinexus::cli
