#pragma once

#include <utility>
#include <vector>

#include "kinexus/grid.hpp"
#include "kinexus/hjb.hpp"
#include "kinexus/kinetic.hpp"
#include "kinexus/tech.hpp"

namespace kinexus::mfg {

struct MfgParams {
  LearningTech tech = LearningTech::constant_rate(0.0);
  double r = 0.0;           // discount rate
  double beta = 0.0;        // symmetric-meeting weight
  TimeAxis time;
  double tol = 1e-6;        // sup-norm tolerance for both residuals
  int max_iter = 100;
  double relaxation = 1.0;  // damping on the strategy update, (0,1]
};

struct IterationResidual {
  double delta_F = 0.0;  // sup over steps/nodes of |F_m - F_{m-1}|
  double delta_V = 0.0;  // sup over steps/nodes of |V_m - V_{m-1}| / (1+z)
};

/// Full forward/backward trajectory of the coupled system plus the Picard
/// residual history. converged == false is a reported state, not an error.
struct MfgSolution {
  std::vector<DensityField> density_path;
  std::vector<ValueField> value_path;
  std::vector<StrategyField> strategy_path;
  std::vector<double> production_series;  // Y(t_k)
  int iterations = 0;
  bool converged = false;
  std::vector<IterationResidual> residuals;
};

/// Per-capita production Y = int (1 - s(z)) z f(z) dz.
double production(const DensityField& f, const StrategyField& s);

/// Alternating full-horizon sweeps: forward density under the frozen
/// strategy path, backward value against the frozen density path, until the
/// CDF and (1+z)-weighted value sup-distances both drop below tol.
MfgSolution solve_mfg(const DensityField& f0, const MfgParams& params);

struct PerturbedDensity {
  DensityField field;
  double raw_mass_delta = 0.0;  // mass change before renormalization
};

/// f0 + amplitude (1 - z) sin(freq pi z) on [window.first, window.second].
/// The result is renormalized back to the original mass when the raw change
/// exceeds 1e-10; the raw change is always reported.
PerturbedDensity perturb_density(const DensityField& f0, double amplitude, double freq,
                                 std::pair<double, double> window);

}  // namespace kinexus::mfg
