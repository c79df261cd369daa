#include "kinexus/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinexus {

std::size_t Mesh::nearest(double z) const {
  const auto it = std::lower_bound(nodes.begin(), nodes.end(), z);
  if (it == nodes.begin()) return 0;
  if (it == nodes.end()) return nodes.size() - 1;
  const std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
  const std::size_t lo = hi - 1;
  return (z - nodes[lo] <= nodes[hi] - z) ? lo : hi;
}

double Mesh::interpolate(std::span<const double> values, double z) const {
  require(values.size() == nodes.size(), Errc::DimensionMismatch,
          "interpolate: values size " + std::to_string(values.size()));
  if (z < z_min || z > z_max) return 0.0;
  const auto it = std::upper_bound(nodes.begin(), nodes.end(), z);
  if (it == nodes.begin()) return values.front();
  if (it == nodes.end()) return values.back();
  const std::size_t hi = static_cast<std::size_t>(it - nodes.begin());
  const std::size_t lo = hi - 1;
  const double t = (z - nodes[lo]) / (nodes[hi] - nodes[lo]);
  return values[lo] + t * (values[hi] - values[lo]);
}

Mesh build_mesh(Spacing spacing, double z_min, double z_max, std::size_t n_nodes) {
  require(n_nodes >= 3, Errc::InvalidMesh,
          "need at least 3 nodes, got " + std::to_string(n_nodes));
  require(std::isfinite(z_min) && std::isfinite(z_max) && z_min < z_max,
          Errc::InvalidMesh, "need z_min < z_max");
  if (spacing == Spacing::Logarithmic) {
    require(z_min > 0.0, Errc::InvalidMesh, "logarithmic spacing needs z_min > 0");
  } else {
    require(z_min >= 0.0, Errc::InvalidMesh, "z_min must be non-negative");
  }

  Mesh mesh;
  mesh.spacing = spacing;
  mesh.z_min = z_min;
  mesh.z_max = z_max;
  mesh.nodes.resize(n_nodes);

  const std::size_t last = n_nodes - 1;
  if (spacing == Spacing::Linear) {
    const double h = (z_max - z_min) / static_cast<double>(last);
    for (std::size_t i = 0; i < n_nodes; ++i)
      mesh.nodes[i] = z_min + h * static_cast<double>(i);
  } else {
    const double l0 = std::log(z_min);
    const double dl = (std::log(z_max) - l0) / static_cast<double>(last);
    for (std::size_t i = 0; i < n_nodes; ++i)
      mesh.nodes[i] = std::exp(l0 + dl * static_cast<double>(i));
  }
  // Pin the endpoints exactly; the interior construction keeps the node
  // ratios constant to roundoff.
  mesh.nodes.front() = z_min;
  mesh.nodes.back() = z_max;

  mesh.weights.resize(n_nodes);
  mesh.weights.front() = 0.5 * (mesh.nodes[1] - mesh.nodes[0]);
  mesh.weights.back() = 0.5 * (mesh.nodes[last] - mesh.nodes[last - 1]);
  for (std::size_t i = 1; i < last; ++i)
    mesh.weights[i] = 0.5 * (mesh.nodes[i + 1] - mesh.nodes[i - 1]);
  return mesh;
}

MeshPtr make_mesh(Spacing spacing, double z_min, double z_max, std::size_t n_nodes) {
  return std::make_shared<const Mesh>(build_mesh(spacing, z_min, z_max, n_nodes));
}

double integrate(std::span<const double> values, const Mesh& mesh) {
  require(values.size() == mesh.size(), Errc::DimensionMismatch,
          "integrate: got " + std::to_string(values.size()) + " values for " +
              std::to_string(mesh.size()) + " nodes");
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += mesh.weights[i] * values[i];
  return acc;
}

void partial_integrals_into(std::span<const double> values, const Mesh& mesh,
                            std::span<double> lower, std::span<double> upper) {
  const std::size_t n = mesh.size();
  require(values.size() == n && lower.size() == n && upper.size() == n,
          Errc::DimensionMismatch, "partial_integrals: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = mesh.weights[i] * values[i];
    lower[i] = acc + 0.5 * a;
    acc += a;
  }
  // upper = total - lower keeps the decomposition identity exact.
  for (std::size_t i = 0; i < n; ++i) upper[i] = acc - lower[i];
}

PartialIntegrals partial_integrals(std::span<const double> values, const Mesh& mesh) {
  PartialIntegrals out;
  out.lower.resize(mesh.size());
  out.upper.resize(mesh.size());
  partial_integrals_into(values, mesh, out.lower, out.upper);
  return out;
}

std::vector<double> cumulative_trapezoid(std::span<const double> values, const Mesh& mesh) {
  const std::size_t n = mesh.size();
  require(values.size() == n, Errc::DimensionMismatch, "cumulative_trapezoid: size mismatch");
  std::vector<double> out(n);
  double acc = 0.0;
  out[0] = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    acc += 0.5 * (mesh.nodes[i] - mesh.nodes[i - 1]) * (values[i] + values[i - 1]);
    out[i] = acc;
  }
  return out;
}

}  // namespace kinexus
