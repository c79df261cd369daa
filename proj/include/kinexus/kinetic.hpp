#pragma once

#include <span>
#include <vector>

#include "kinexus/grid.hpp"
#include "kinexus/tech.hpp"

namespace kinexus {

/// Agent density f(z_i) on a mesh, with its cached trapezoid mass.
/// Snapshots are immutable once built; the steppers produce new fields.
struct DensityField {
  MeshPtr mesh;
  std::vector<double> values;
  double mass = 0.0;
};

/// Per-node learning effort s(z_i) in [0,1].
struct StrategyField {
  MeshPtr mesh;
  std::vector<double> values;
};

/// Validates values >= 0 (finite) and caches the mass.
DensityField make_density(MeshPtr mesh, std::vector<double> values);

StrategyField make_strategy(MeshPtr mesh, std::vector<double> values);

namespace kinetic {

/// Largest negative excursion tolerated after a step, relative to max f.
/// Anything below it signals a too-large dt and aborts the step.
inline constexpr double kPositivityTol = 1e-13;

/// d/dt f for the knowledge-exchange collision rule,
///   -f(z) int_z^zmax [alpha(z) + beta alpha(y)] f(y) dy
///   +f(z) int_0^z    [alpha(y) + beta alpha(z)] f(y) dy,
/// with alpha already evaluated per node and the half-weight partial
/// integrals, so gain and loss are exactly adjoint (mass is conserved to
/// roundoff and an isolated point mass is stationary).
std::vector<double> collision_rhs(const DensityField& f,
                                  std::span<const double> alpha_at_nodes, double beta);

/// Owns the scratch arrays for repeated stepping on one mesh.
class DensityStepper {
 public:
  DensityStepper(MeshPtr mesh, double beta);

  /// One Heun step of size dt. alpha_now / alpha_next are alpha(s(.)) at the
  /// step's start and end times (pass the same span when alpha is frozen).
  DensityField step(const DensityField& f, std::span<const double> alpha_now,
                    std::span<const double> alpha_next, double dt);

  double beta() const { return beta_; }

 private:
  void rhs_into(std::span<const double> f, std::span<const double> alpha,
                std::span<double> out);

  MeshPtr mesh_;
  double beta_;
  std::vector<double> af_, lower_f_, upper_f_, lower_af_, upper_af_;
  std::vector<double> k1_, k2_, stage_;
};

/// Convenience single step with time-independent alpha.
DensityField step_density(const DensityField& f, std::span<const double> alpha_at_nodes,
                          double beta, double dt);

/// Forward simulation with a fixed per-node alpha table (no control).
/// Returns n_steps + 1 snapshots including the initial one.
std::vector<DensityField> simulate_density(const DensityField& f0,
                                           std::span<const double> alpha_at_nodes,
                                           double beta, const TimeAxis& time);

/// Cumulative distribution of f: running trapezoid sums, so F(z_min) = 0 and
/// F(z_max) = mass exactly.
std::vector<double> cdf(const DensityField& f);

/// Closed-form logistic evolution of a unit-mass CDF under a constant
/// learning rate: F(t) = F0 / (F0 + (1 - F0) e^{alpha0 t}). Independent
/// oracle for the constant-alpha dynamics; not used by the solvers.
std::vector<double> evolve_cdf_constant_alpha(std::span<const double> F0, double alpha0,
                                              double t);

double first_moment(const DensityField& f);

/// Mass above the node nearest z0 (complement of the running-trapezoid CDF).
/// z_used, when non-null, receives the snapped node position.
double tail_mass(const DensityField& f, double z0, double* z_used = nullptr);

/// Density whose CDF is the Frechet law exp(-k z^{-1/theta}) (Pareto tail
/// with constants k, theta), renormalized to unit mass on the mesh.
DensityField frechet_initial_density(MeshPtr mesh, double k, double theta);

}  // namespace kinetic
}  // namespace kinexus
