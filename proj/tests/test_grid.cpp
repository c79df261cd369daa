#include <doctest.h>

#include <cmath>
#include <random>

#include "kinexus/grid.hpp"

using namespace kinexus;

TEST_CASE("linear three-node mesh has the textbook trapezoid weights") {
  const Mesh mesh = build_mesh(Spacing::Linear, 0.0, 1.0, 3);
  REQUIRE(mesh.nodes.size() == 3);
  CHECK(mesh.nodes[0] == 0.0);
  CHECK(mesh.nodes[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.nodes[2] == 1.0);
  CHECK(mesh.weights[0] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(mesh.weights[1] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(mesh.weights[2] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("logarithmic mesh keeps a constant node ratio") {
  const Mesh mesh = build_mesh(Spacing::Logarithmic, 0.01, 1.0, 1001);
  const double expected = std::pow(100.0, 1.0 / 1000.0);  // geometric spacing
  CHECK(expected == doctest::Approx(1.0046158).epsilon(1e-6));
  for (std::size_t i = 1; i < mesh.nodes.size(); ++i) {
    const double ratio = mesh.nodes[i] / mesh.nodes[i - 1];
    CHECK(std::abs(ratio - expected) / expected <= 1e-12);
  }
  CHECK(mesh.nodes.front() == 0.01);
  CHECK(mesh.nodes.back() == 1.0);
}

TEST_CASE("mesh construction rejects degenerate input") {
  CHECK_THROWS_AS(build_mesh(Spacing::Linear, 0.0, 1.0, 2), Error);
  CHECK_THROWS_AS(build_mesh(Spacing::Logarithmic, 0.0, 1.0, 16), Error);
  CHECK_THROWS_AS(build_mesh(Spacing::Linear, 1.0, 1.0, 16), Error);
  try {
    build_mesh(Spacing::Linear, 0.0, 1.0, 2);
    FAIL("unreachable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::InvalidMesh);
  }
}

TEST_CASE("weights sum to the interval length") {
  for (const Mesh& mesh : {build_mesh(Spacing::Linear, 0.0, 7.5, 313),
                           build_mesh(Spacing::Logarithmic, 1e-3, 3e5, 1001)}) {
    double sum = 0.0;
    for (double w : mesh.weights) sum += w;
    CHECK(std::abs(sum - (mesh.z_max - mesh.z_min)) / (mesh.z_max - mesh.z_min) <= 1e-12);
  }
}

TEST_CASE("integrate reproduces polynomial references") {
  const Mesh mesh = build_mesh(Spacing::Linear, 0.0, 1.0, 101);
  std::vector<double> ones(mesh.size(), 1.0);
  CHECK(integrate(ones, mesh) == doctest::Approx(1.0).epsilon(1e-14));

  // Trapezoid is exact on linear integrands.
  CHECK(integrate(mesh.nodes, mesh) == doctest::Approx(0.5).epsilon(1e-14));

  std::vector<double> sq(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) sq[i] = mesh.nodes[i] * mesh.nodes[i];
  CHECK(std::abs(integrate(sq, mesh) - 1.0 / 3.0) <= 2e-5);

  std::vector<double> wrong(7, 1.0);
  CHECK_THROWS_AS((void)integrate(wrong, mesh), Error);
}

TEST_CASE("partial integrals split each node's weight in half") {
  const Mesh mesh = build_mesh(Spacing::Linear, 0.0, 1.0, 101);
  std::vector<double> ones(mesh.size(), 1.0);
  const PartialIntegrals parts = partial_integrals(ones, mesh);

  // Node i contributes w_i/2 to its own lower integral, including at the ends.
  CHECK(parts.lower.front() == doctest::Approx(0.5 * mesh.weights.front()).epsilon(1e-15));
  CHECK(parts.upper.back() == doctest::Approx(0.5 * mesh.weights.back()).epsilon(1e-15));

  const std::size_t mid = mesh.nearest(0.5);
  CHECK(mesh.nodes[mid] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(parts.lower[mid] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("decomposition and monotonicity hold for random data") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> value(0.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const bool log_spacing = (trial % 2) == 0;
    const Mesh mesh = log_spacing ? build_mesh(Spacing::Logarithmic, 1e-2, 50.0, 257)
                                  : build_mesh(Spacing::Linear, 0.0, 4.0, 257);
    std::vector<double> values(mesh.size());
    for (double& v : values) v = value(rng);
    const double total = integrate(values, mesh);
    const PartialIntegrals parts = partial_integrals(values, mesh);
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      CHECK(std::abs(parts.lower[i] + parts.upper[i] - total) <= 1e-14 * std::abs(total));
      if (i > 0) {
        CHECK(parts.lower[i] >= parts.lower[i - 1]);
        CHECK(parts.upper[i] <= parts.upper[i - 1]);
      }
    }
  }
}

TEST_CASE("cumulative trapezoid anchors both ends") {
  const Mesh mesh = build_mesh(Spacing::Linear, 0.0, 1.0, 101);
  std::vector<double> ones(mesh.size(), 1.0);
  const std::vector<double> F = cumulative_trapezoid(ones, mesh);
  CHECK(F.front() == 0.0);
  CHECK(F.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(F[mesh.nearest(0.5)] == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("nearest and interpolate behave at and between nodes") {
  const Mesh mesh = build_mesh(Spacing::Linear, 0.0, 1.0, 11);
  CHECK(mesh.nearest(0.0) == 0);
  CHECK(mesh.nearest(1.0) == 10);
  CHECK(mesh.nearest(0.44) == 4);
  CHECK(mesh.nearest(0.46) == 5);

  std::vector<double> values(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) values[i] = 2.0 * mesh.nodes[i] + 1.0;
  CHECK(mesh.interpolate(values, 0.37) == doctest::Approx(1.74).epsilon(1e-14));
  CHECK(mesh.interpolate(values, -0.5) == 0.0);
  CHECK(mesh.interpolate(values, 1.5) == 0.0);
}

TEST_CASE("time axis spacing") {
  const TimeAxis time{200.0, 400};
  CHECK(time.dt() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(time.time(400) == doctest::Approx(200.0).epsilon(1e-15));
}
