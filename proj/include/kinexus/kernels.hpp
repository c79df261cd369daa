#pragma once

#include <cstddef>
#include <span>

#include "kinexus/tech.hpp"

namespace kinexus::kernels {

/// Per-node update maps used by the solvers. The functions in this namespace
/// run the loop with OpenMP above kMinParallel elements; kernels::serial
/// holds the plain-loop reference implementations the tests compare against.
/// Every kernel writes each element independently (no floating-point
/// reductions), so results are bitwise identical to the serial versions for
/// any thread count.
inline constexpr std::size_t kMinParallel = 4096;

/// d/dt f at each node from the half-weight partial integrals of f and of
/// alpha*f. beta is the symmetric-meeting weight; beta = 0 is the baseline
/// one-sided rule.
void collision_rhs(std::span<const double> f, std::span<const double> alpha,
                   std::span<const double> lower_f, std::span<const double> upper_f,
                   std::span<const double> lower_af, std::span<const double> upper_af,
                   double beta, std::span<double> out);

/// out = f + c1*k1 + c2*k2 (pass an empty k2 with c2 = 0 for a plain axpy).
void weighted_update(std::span<const double> f, double c1, std::span<const double> k1,
                     double c2, std::span<const double> k2, std::span<double> out);

/// Optimal strategy and alpha(strategy) at every node.
void control_sweep(std::span<const double> z, std::span<const double> gain,
                   const LearningTech& tech, std::span<double> s_out,
                   std::span<double> alpha_out);

/// gain[i] = upper_vf[i] - v[i] * upper_f[i]
void gain_combine(std::span<const double> v, std::span<const double> upper_f,
                  std::span<const double> upper_vf, std::span<double> out);

/// Explicit backward value update:
/// out[i] = (1 - r*dt) * v[i] + dt * ((1 - s[i]) * z[i] + alpha_s[i] * gain[i])
void value_backward_update(std::span<const double> v, std::span<const double> z,
                           std::span<const double> s, std::span<const double> alpha_s,
                           std::span<const double> gain, double r, double dt,
                           std::span<double> out);

namespace serial {

void collision_rhs(std::span<const double> f, std::span<const double> alpha,
                   std::span<const double> lower_f, std::span<const double> upper_f,
                   std::span<const double> lower_af, std::span<const double> upper_af,
                   double beta, std::span<double> out);
void weighted_update(std::span<const double> f, double c1, std::span<const double> k1,
                     double c2, std::span<const double> k2, std::span<double> out);
void control_sweep(std::span<const double> z, std::span<const double> gain,
                   const LearningTech& tech, std::span<double> s_out,
                   std::span<double> alpha_out);
void gain_combine(std::span<const double> v, std::span<const double> upper_f,
                  std::span<const double> upper_vf, std::span<double> out);
void value_backward_update(std::span<const double> v, std::span<const double> z,
                           std::span<const double> s, std::span<const double> alpha_s,
                           std::span<const double> gain, double r, double dt,
                           std::span<double> out);

}  // namespace serial

}  // namespace kinexus::kernels
