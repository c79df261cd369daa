#include "kinexus/kernels.hpp"

#include <cstdint>

#include "kinexus/control.hpp"

namespace kinexus::kernels {

namespace {

inline double rhs_at(std::size_t i, std::span<const double> f,
                     std::span<const double> alpha, std::span<const double> lower_f,
                     std::span<const double> upper_f, std::span<const double> lower_af,
                     std::span<const double> upper_af, double beta) {
  const double loss = alpha[i] * upper_f[i] + beta * upper_af[i];
  const double gain = lower_af[i] + beta * alpha[i] * lower_f[i];
  return f[i] * (gain - loss);
}

inline double update_at(std::size_t i, std::span<const double> f, double c1,
                        std::span<const double> k1, double c2,
                        std::span<const double> k2) {
  double v = f[i] + c1 * k1[i];
  if (!k2.empty()) v += c2 * k2[i];
  return v;
}

inline double value_at(std::size_t i, std::span<const double> v,
                       std::span<const double> z, std::span<const double> s,
                       std::span<const double> alpha_s, std::span<const double> gain,
                       double r, double dt) {
  return (1.0 - r * dt) * v[i] + dt * ((1.0 - s[i]) * z[i] + alpha_s[i] * gain[i]);
}

}  // namespace

namespace serial {

void collision_rhs(std::span<const double> f, std::span<const double> alpha,
                   std::span<const double> lower_f, std::span<const double> upper_f,
                   std::span<const double> lower_af, std::span<const double> upper_af,
                   double beta, std::span<double> out) {
  for (std::size_t i = 0; i < f.size(); ++i)
    out[i] = rhs_at(i, f, alpha, lower_f, upper_f, lower_af, upper_af, beta);
}

void weighted_update(std::span<const double> f, double c1, std::span<const double> k1,
                     double c2, std::span<const double> k2, std::span<double> out) {
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = update_at(i, f, c1, k1, c2, k2);
}

void control_sweep(std::span<const double> z, std::span<const double> gain,
                   const LearningTech& tech, std::span<double> s_out,
                   std::span<double> alpha_out) {
  for (std::size_t i = 0; i < z.size(); ++i) {
    const hjb::Control c = hjb::optimal_control(z[i], gain[i], tech);
    s_out[i] = c.s;
    alpha_out[i] = c.alpha;
  }
}

void gain_combine(std::span<const double> v, std::span<const double> upper_f,
                  std::span<const double> upper_vf, std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = upper_vf[i] - v[i] * upper_f[i];
}

void value_backward_update(std::span<const double> v, std::span<const double> z,
                           std::span<const double> s, std::span<const double> alpha_s,
                           std::span<const double> gain, double r, double dt,
                           std::span<double> out) {
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = value_at(i, v, z, s, alpha_s, gain, r, dt);
}

}  // namespace serial

void collision_rhs(std::span<const double> f, std::span<const double> alpha,
                   std::span<const double> lower_f, std::span<const double> upper_f,
                   std::span<const double> lower_af, std::span<const double> upper_af,
                   double beta, std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(f.size());
  if (static_cast<std::size_t>(n) < kMinParallel) {
    serial::collision_rhs(f, alpha, lower_f, upper_f, lower_af, upper_af, beta, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = rhs_at(static_cast<std::size_t>(i), f, alpha, lower_f, upper_f, lower_af,
                    upper_af, beta);
}

void weighted_update(std::span<const double> f, double c1, std::span<const double> k1,
                     double c2, std::span<const double> k2, std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(f.size());
  if (static_cast<std::size_t>(n) < kMinParallel) {
    serial::weighted_update(f, c1, k1, c2, k2, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = update_at(static_cast<std::size_t>(i), f, c1, k1, c2, k2);
}

void control_sweep(std::span<const double> z, std::span<const double> gain,
                   const LearningTech& tech, std::span<double> s_out,
                   std::span<double> alpha_out) {
  const std::int64_t n = static_cast<std::int64_t>(z.size());
  if (static_cast<std::size_t>(n) < kMinParallel) {
    serial::control_sweep(z, gain, tech, s_out, alpha_out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const hjb::Control c = hjb::optimal_control(z[i], gain[i], tech);
    s_out[i] = c.s;
    alpha_out[i] = c.alpha;
  }
}

void gain_combine(std::span<const double> v, std::span<const double> upper_f,
                  std::span<const double> upper_vf, std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  if (static_cast<std::size_t>(n) < kMinParallel) {
    serial::gain_combine(v, upper_f, upper_vf, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = upper_vf[i] - v[i] * upper_f[i];
}

void value_backward_update(std::span<const double> v, std::span<const double> z,
                           std::span<const double> s, std::span<const double> alpha_s,
                           std::span<const double> gain, double r, double dt,
                           std::span<double> out) {
  const std::int64_t n = static_cast<std::int64_t>(v.size());
  if (static_cast<std::size_t>(n) < kMinParallel) {
    serial::value_backward_update(v, z, s, alpha_s, gain, r, dt, out);
    return;
  }
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i)
    out[i] = value_at(static_cast<std::size_t>(i), v, z, s, alpha_s, gain, r, dt);
}

}  // namespace kinexus::kernels
