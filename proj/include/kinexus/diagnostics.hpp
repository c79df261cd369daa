#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "kinexus/grid.hpp"
#include "kinexus/kinetic.hpp"

namespace kinexus::diag {

/// Power-law fit of the upper tail mass - F(z) ~ k z^{-1/theta}.
struct TailFit {
  double theta_hat = 0.0;
  double k_hat = 0.0;
  double r_squared = 0.0;
  std::pair<double, double> window{0.0, 0.0};
};

/// Least squares of log(mass - F) against log z on the window.
TailFit fit_pareto_tail(std::span<const double> F, const Mesh& mesh,
                        std::pair<double, double> window, double mass = 1.0);

/// Window picker for transient snapshots: the nodes where the tail fraction
/// (mass - F)/mass lies in [0.003, 0.05] (below the curvature of a Frechet
/// shoulder, above domain-truncation contamination).
std::pair<double, double> transient_tail_window(std::span<const double> F,
                                                const Mesh& mesh, double mass = 1.0);

/// psi(x) = e^{gamma t} f(x e^{gamma t}, t) sampled on target (linear
/// interpolation; points mapping outside the source mesh evaluate to 0 and
/// are counted).
std::vector<double> rescale_density(const DensityField& f, double gamma, double t,
                                    const Mesh& target, int* out_of_range = nullptr);

struct GrowthFit {
  double gamma_hat = 0.0;
  std::pair<double, double> window{0.0, 0.0};
  double linearity_r2 = 0.0;
};

/// Linear regression of log Y on t over the window.
GrowthFit fit_growth_rate(std::span<const double> Y, std::span<const double> t,
                          std::pair<double, double> window);

struct DiracMetrics {
  std::optional<double> concentration_time;  // first t with >= 90% of the mass
  double final_tail_mass = 0.0;
  double z_threshold = 0.0;  // M minus eps_cells mesh cells, snapped to a node
};

/// Concentration diagnostics near the top of the support M: the threshold is
/// eps_cells mesh cells below M and concentration means tail mass >= 0.9 of
/// the total.
DiracMetrics dirac_metrics(const std::vector<DensityField>& density_path,
                           const TimeAxis& time, double M, int eps_cells);

}  // namespace kinexus::diag
