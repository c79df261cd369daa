#include <doctest.h>

#include <random>
#include <vector>

#include "kinexus/kernels.hpp"

using namespace kinexus;

namespace {

std::vector<double> random_vector(std::mt19937& rng, std::size_t n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

}  // namespace

// The OpenMP kernels are element-wise maps, so they must agree with the
// serial reference bit for bit, at any size and thread count.
TEST_CASE("parallel kernels match the serial reference exactly") {
  std::mt19937 rng(7);
  for (const std::size_t n : {513, 100000}) {
    const auto f = random_vector(rng, n, 0.0, 2.0);
    const auto alpha = random_vector(rng, n, 0.0, 1.0);
    const auto lf = random_vector(rng, n, 0.0, 1.0);
    const auto uf = random_vector(rng, n, 0.0, 1.0);
    const auto laf = random_vector(rng, n, 0.0, 1.0);
    const auto uaf = random_vector(rng, n, 0.0, 1.0);
    std::vector<double> a(n), b(n);

    kernels::collision_rhs(f, alpha, lf, uf, laf, uaf, 0.7, a);
    kernels::serial::collision_rhs(f, alpha, lf, uf, laf, uaf, 0.7, b);
    CHECK(a == b);

    const auto k1 = random_vector(rng, n, -1.0, 1.0);
    const auto k2 = random_vector(rng, n, -1.0, 1.0);
    kernels::weighted_update(f, 0.25, k1, 0.25, k2, a);
    kernels::serial::weighted_update(f, 0.25, k1, 0.25, k2, b);
    CHECK(a == b);

    const auto z = random_vector(rng, n, 0.0, 10.0);
    const auto gain = random_vector(rng, n, -2.0, 30.0);
    const LearningTech tech = LearningTech::power_law(0.0849, 0.3);
    std::vector<double> s1(n), al1(n), s2(n), al2(n);
    kernels::control_sweep(z, gain, tech, s1, al1);
    kernels::serial::control_sweep(z, gain, tech, s2, al2);
    CHECK(s1 == s2);
    CHECK(al1 == al2);

    kernels::gain_combine(f, uf, uaf, a);
    kernels::serial::gain_combine(f, uf, uaf, b);
    CHECK(a == b);

    kernels::value_backward_update(f, z, s1, al1, gain, 0.06, 0.5, a);
    kernels::serial::value_backward_update(f, z, s1, al1, gain, 0.06, 0.5, b);
    CHECK(a == b);
  }
}

TEST_CASE("weighted update with an empty second stage is a plain axpy") {
  std::vector<double> f{1.0, 2.0, 3.0};
  std::vector<double> k1{0.5, -1.0, 0.0};
  std::vector<double> out(3);
  kernels::weighted_update(f, 2.0, k1, 0.0, {}, out);
  CHECK(out == std::vector<double>{2.0, 0.0, 3.0});
}
