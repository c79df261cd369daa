#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kinexus/error.hpp"

namespace kinexus {

enum class Spacing { Linear, Logarithmic };

/// One-dimensional mesh over the knowledge interval [z_min, z_max] with
/// composite trapezoid weights. Immutable after construction; safe to share
/// across threads.
struct Mesh {
  Spacing spacing = Spacing::Logarithmic;
  double z_min = 0.0;
  double z_max = 0.0;
  std::vector<double> nodes;    // strictly increasing, nodes.front()==z_min
  std::vector<double> weights;  // sum == z_max - z_min

  std::size_t size() const { return nodes.size(); }

  /// Index of the node closest to z (ties resolve to the lower index).
  std::size_t nearest(double z) const;

  /// Piecewise-linear evaluation of per-node values at z; 0 outside
  /// [z_min, z_max].
  double interpolate(std::span<const double> values, double z) const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

Mesh build_mesh(Spacing spacing, double z_min, double z_max, std::size_t n_nodes);
MeshPtr make_mesh(Spacing spacing, double z_min, double z_max, std::size_t n_nodes);

/// Uniform time grid t_k = k * dt, k = 0..n_steps.
struct TimeAxis {
  double t_final = 0.0;
  int n_steps = 0;

  double dt() const { return t_final / n_steps; }
  double time(int k) const { return dt() * k; }
};

/// Trapezoid quadrature: sum_i w_i * values_i.
double integrate(std::span<const double> values, const Mesh& mesh);

/// Split of the quadrature into lower[i] ~ int_{z0}^{zi} and
/// upper[i] ~ int_{zi}^{zmax}. Node i's own weight contributes w_i/2 to each
/// side, which makes the induced gain/loss operators exactly adjoint and
/// guarantees lower[i] + upper[i] == integrate(values) bitwise for every i.
struct PartialIntegrals {
  std::vector<double> lower;
  std::vector<double> upper;
};

PartialIntegrals partial_integrals(std::span<const double> values, const Mesh& mesh);
void partial_integrals_into(std::span<const double> values, const Mesh& mesh,
                            std::span<double> lower, std::span<double> upper);

/// Running trapezoid sums: out[0] == 0 and out[n-1] == integrate(values)
/// up to roundoff in the accumulation order.
std::vector<double> cumulative_trapezoid(std::span<const double> values, const Mesh& mesh);

}  // namespace kinexus
