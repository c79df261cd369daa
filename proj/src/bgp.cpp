#include "kinexus/bgp.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "kinexus/log.hpp"

namespace kinexus::bgp {

namespace {

using State2 = std::array<double, 2>;
using Rhs2 = std::function<void(double, const State2&, State2&)>;

State2 rk4_step(double x, double h, const State2& y, const Rhs2& rhs) {
  State2 k1, k2, k3, k4, t;
  rhs(x, y, k1);
  for (int j = 0; j < 2; ++j) t[j] = y[j] + 0.5 * h * k1[j];
  rhs(x + 0.5 * h, t, k2);
  for (int j = 0; j < 2; ++j) t[j] = y[j] + 0.5 * h * k2[j];
  rhs(x + 0.5 * h, t, k3);
  for (int j = 0; j < 2; ++j) t[j] = y[j] + h * k3[j];
  rhs(x + h, t, k4);
  State2 out;
  for (int j = 0; j < 2; ++j)
    out[j] = y[j] + (h / 6.0) * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
  return out;
}

/// RK4 with step-doubling error control on [a, b].
State2 integrate_cell(double a, double b, State2 y, const Rhs2& rhs, double tol) {
  struct Seg {
    double a, b;
    int depth;
  };
  std::vector<Seg> stack{{a, b, 0}};
  while (!stack.empty()) {
    const Seg seg = stack.back();
    stack.pop_back();
    const double h = seg.b - seg.a;
    const State2 full = rk4_step(seg.a, h, y, rhs);
    const double mid = seg.a + 0.5 * h;
    State2 half = rk4_step(seg.a, 0.5 * h, y, rhs);
    half = rk4_step(mid, 0.5 * h, half, rhs);
    const double err =
        std::max(std::abs(full[0] - half[0]), std::abs(full[1] - half[1]));
    if (err > tol && seg.depth < 30) {
      stack.push_back({mid, seg.b, seg.depth + 1});
      stack.push_back({seg.a, mid, seg.depth + 1});
    } else {
      y = half;
    }
  }
  return y;
}

constexpr double kOdeTol = 1e-10;

double centered_derivative(std::span<const double> f, std::span<const double> x,
                           std::size_t i) {
  const std::size_t n = f.size();
  if (i == 0) return (f[1] - f[0]) / (x[1] - x[0]);
  if (i == n - 1) return (f[n - 1] - f[n - 2]) / (x[n - 1] - x[n - 2]);
  const double h1 = x[i] - x[i - 1];
  const double h2 = x[i + 1] - x[i];
  return (f[i + 1] * h1 * h1 - f[i - 1] * h2 * h2 + f[i] * (h2 * h2 - h1 * h1)) /
         (h1 * h2 * (h1 + h2));
}

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

double gamma_from_profile(std::span<const double> phi, std::span<const double> sigma,
                          const LearningTech& tech, double theta, const Mesh& mesh) {
  require(phi.size() == mesh.size() && sigma.size() == mesh.size(),
          Errc::MeshMismatch, "gamma_from_profile: size mismatch");
  require(theta > 0.0, Errc::InvalidParam, "gamma_from_profile: theta must be positive");
  require(tech.kind() != LearningTech::Kind::SpatialRule, Errc::InvalidTech,
          "gamma_from_profile: needs alpha as a function of the strategy");
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    acc += mesh.weights[i] * tech.alpha_of(sigma[i]) * phi[i];
  return theta * acc;
}

WOdeResult solve_w_ode(std::function<double(double)> Phi, std::function<double(double)> phi,
                       double gamma, double r, double alpha0, const Mesh& mesh) {
  require(gamma > 0.0, Errc::InvalidParam, "solve_w_ode: gamma must be positive");
  const std::size_t n = mesh.size();
  const double q_end = 1.0 - Phi(mesh.z_max);
  require(q_end < 1e-3, Errc::InvalidParam,
          "solve_w_ode: x_max leaves " + std::to_string(q_end) +
              " of the mass outside; enlarge the domain");
  if (r <= gamma)
    log_warn("solve_w_ode: r <= gamma; the decaying branch may not exist, "
             "relying on the residual check");

  // State (Ht, W) with Ht(x) = int_{x_min}^x y phi dy. The anchor offset of H
  // is absorbed into the shot constant: the equation only sees Ht + Kp.
  auto make_rhs = [&](double Kp) {
    return Rhs2([=, &Phi, &phi](double x, const State2& y, State2& dy) {
      dy[0] = x * phi(x);
      dy[1] = ((gamma - r - alpha0 * Phi(x)) * y[1] - y[0] - Kp) / (gamma * x);
    });
  };

  std::vector<double> Ht(n), W(n);
  auto shoot = [&](double Kp) {
    const Rhs2 rhs = make_rhs(Kp);
    State2 y;
    y[0] = 0.0;
    // Regular branch at the left singular end: gamma x W' -> 0.
    y[1] = Kp / (gamma - r - alpha0 * Phi(mesh.z_min));
    Ht[0] = y[0];
    W[0] = y[1];
    for (std::size_t i = 1; i < n; ++i) {
      y = integrate_cell(mesh.nodes[i - 1], mesh.nodes[i], y, rhs, kOdeTol);
      Ht[i] = y[0];
      W[i] = y[1];
    }
    return W[n - 1];
  };

  // The map Kp -> W(x_max) is affine, so a secant step lands on the root;
  // iterate a few times to clear roundoff.
  double k0 = 0.0, k1 = 1.0;
  double f0 = shoot(k0);
  double f1 = shoot(k1);
  int shots = 2;
  double k_star = k1;
  for (int it = 0; it < 8; ++it) {
    require(f1 != f0, Errc::NotConverged, "solve_w_ode: degenerate shooting map");
    k_star = k1 - f1 * (k1 - k0) / (f1 - f0);
    k0 = k1;
    f0 = f1;
    k1 = k_star;
    f1 = shoot(k_star);
    ++shots;
    if (std::abs(f1) < 1e-10) break;
  }
  require(std::abs(f1) < 1e-10, Errc::NotConverged,
          "solve_w_ode: shooting did not reach |W(x_max)| < 1e-10");

  WOdeResult out;
  out.K = k_star + Ht[n - 1];  // back to the x_max-anchored convention
  out.boundary_W = f1;
  out.shots = shots;
  out.W = W;
  out.H.resize(n);
  out.w.resize(n);
  out.v.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mesh.nodes[i];
    out.H[i] = Ht[i] - Ht[n - 1];
    // w = -W' straight from the ODE, no numerical differentiation.
    out.w[i] = (Ht[i] + k_star - (gamma - r - alpha0 * Phi(x)) * W[i]) / (gamma * x);
    const double p = phi(x);
    require(p > 0.0, Errc::InvalidParam, "solve_w_ode: phi vanishes at a node");
    out.v[i] = out.w[i] / p;
  }
  return out;
}

WOdeResult solve_w_ode(std::span<const double> Phi, double gamma, double r, double alpha0,
                       const Mesh& mesh) {
  require(Phi.size() == mesh.size(), Errc::DimensionMismatch,
          "solve_w_ode: Phi/mesh size mismatch");
  const std::size_t n = mesh.size();
  std::vector<double> phi(n), Phi_v(Phi.begin(), Phi.end());
  for (std::size_t i = 0; i < n; ++i)
    phi[i] = centered_derivative(Phi, mesh.nodes, i);
  auto Phi_fn = [&mesh, Phi_v](double x) { return mesh.interpolate(Phi_v, x); };
  auto phi_fn = [&mesh, phi](double x) { return mesh.interpolate(phi, x); };
  return solve_w_ode(Phi_fn, phi_fn, gamma, r, alpha0, mesh);
}

double value_equation_residual(std::span<const double> v, std::span<const double> sigma,
                               std::span<const double> Phi, std::span<const double> phi,
                               const LearningTech& tech, double gamma, double r,
                               const Mesh& mesh) {
  const std::size_t n = mesh.size();
  require(v.size() == n && sigma.size() == n && Phi.size() == n && phi.size() == n,
          Errc::DimensionMismatch, "value_equation_residual: size mismatch");
  std::vector<double> vphi(n), lo(n), upper_phi(n), upper_vphi(n);
  for (std::size_t i = 0; i < n; ++i) vphi[i] = v[i] * phi[i];
  partial_integrals_into(phi, mesh, lo, upper_phi);
  partial_integrals_into(vphi, mesh, lo, upper_vphi);

  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double x = mesh.nodes[i];
    const double dv = centered_derivative(v, mesh.nodes, i);
    const double gain = upper_vphi[i] - v[i] * upper_phi[i];
    const double res = (r - gamma) * v[i] + gamma * dv * x -
                       ((1.0 - sigma[i]) * x + tech.alpha_of(sigma[i]) * gain);
    worst = std::max(worst, std::abs(res) / (1.0 + x));
  }
  return worst;
}

double fit_tail_constant(std::span<const double> tail, double theta, const Mesh& mesh) {
  require(tail.size() == mesh.size(), Errc::DimensionMismatch,
          "fit_tail_constant: size mismatch");
  const double x_lo = mesh.z_max / 10.0;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    if (mesh.nodes[i] < x_lo) continue;
    require(tail[i] > 0.0, Errc::NoTail, "fit_tail_constant: tail vanishes in the window");
    lx.push_back(std::log(mesh.nodes[i]));
    ly.push_back(std::log(tail[i]));
  }
  require(lx.size() >= 3, Errc::NoTail, "fit_tail_constant: too few tail nodes");
  const LineFit fit = least_squares(lx, ly);
  require(fit.slope < 0.0, Errc::NoTail, "fit_tail_constant: tail does not decay");
  const double theta_hat = -1.0 / fit.slope;
  require(std::abs(theta_hat - theta) <= 0.05 * theta, Errc::NoTail,
          "fit_tail_constant: decay exponent " + std::to_string(theta_hat) +
              " is not theta = " + std::to_string(theta) + " within 5%");
  // Exponent is dictated by the dynamics; only the constant is free.
  double acc = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) acc += ly[i] + lx[i] / theta;
  return std::exp(acc / static_cast<double>(lx.size()));
}

namespace {

/// Direct solve of the given-sigma value equation by shooting on
/// lambda = W_v(x_min), with W_v(x) = int_x^xmax v phi dy. The regular branch
/// at the singular left end fixes v(x_min) for each lambda; W_v(x_max) = 0
/// selects lambda (the map is affine).
std::vector<double> solve_v_given_sigma(const std::function<double(double)>& sigma_fn,
                                        const std::function<double(double)>& Phi_fn,
                                        const std::function<double(double)>& phi_fn,
                                        const LearningTech& tech, double gamma, double r,
                                        const Mesh& mesh) {
  const std::size_t n = mesh.size();
  auto g_fn = [&](double x) { return tech.alpha_of(sigma_fn(x)); };

  const Rhs2 rhs = [&](double x, const State2& y, State2& dy) {
    const double g = g_fn(x);
    dy[0] = (-(r - gamma + g * (1.0 - Phi_fn(x))) * y[0] + (1.0 - sigma_fn(x)) * x +
             g * y[1]) /
            (gamma * x);
    dy[1] = -y[0] * phi_fn(x);
  };

  std::vector<double> v(n);
  const double x0 = mesh.z_min;
  const double denom = r - gamma + g_fn(x0) * (1.0 - Phi_fn(x0));
  require(std::abs(denom) > 1e-12, Errc::InvalidParam,
          "solve_v_given_sigma: singular left-end regularity condition");

  auto shoot = [&](double lambda) {
    State2 y;
    y[0] = ((1.0 - sigma_fn(x0)) * x0 + g_fn(x0) * lambda) / denom;
    y[1] = lambda;
    v[0] = y[0];
    for (std::size_t i = 1; i < n; ++i) {
      y = integrate_cell(mesh.nodes[i - 1], mesh.nodes[i], y, rhs, kOdeTol);
      v[i] = y[0];
    }
    return y[1];
  };

  double l0 = 0.0, l1 = 1.0;
  double f0 = shoot(l0);
  double f1 = shoot(l1);
  double l_star = l1;
  for (int it = 0; it < 8; ++it) {
    require(f1 != f0, Errc::NotConverged, "solve_v_given_sigma: degenerate shooting map");
    l_star = l1 - f1 * (l1 - l0) / (f1 - f0);
    l0 = l1;
    f0 = f1;
    l1 = l_star;
    f1 = shoot(l_star);
    if (std::abs(f1) < 1e-10 * std::max(1.0, std::abs(l_star))) break;
  }
  require(std::abs(f1) < 1e-9 * std::max(1.0, std::abs(l_star)), Errc::NotConverged,
          "solve_v_given_sigma: shooting did not close the tail integral");
  return v;
}

}  // namespace

BgpProfile bgp_constant_alpha(double alpha0, double theta, double k_tail, double r,
                              MeshPtr mesh) {
  require(mesh != nullptr, Errc::MeshMismatch, "bgp_constant_alpha: null mesh");
  require(alpha0 > 0.0 && theta > 0.0 && k_tail > 0.0, Errc::InvalidParam,
          "bgp_constant_alpha: alpha0, theta, k must be positive");
  require(mesh->z_min > 0.0, Errc::InvalidParam, "bgp_constant_alpha: needs z_min > 0");

  const double gamma = theta * alpha0;  // unit-mass profile
  if (r <= gamma)
    log_warn("bgp_constant_alpha: r <= gamma; value may not decay");

  const std::size_t n = mesh->size();
  BgpProfile prof;
  prof.mesh = mesh;
  prof.gamma = gamma;
  prof.theta = theta;
  prof.r = r;
  prof.sigma.assign(n, 0.0);
  prof.Phi.resize(n);
  prof.phi.resize(n);
  prof.tail.resize(n);

  const double inv_theta = 1.0 / theta;
  auto p_of = [&](double x) { return k_tail * std::exp(-inv_theta * std::log(x)); };
  auto Phi_fn = [&](double x) { return 1.0 / (1.0 + p_of(x)); };
  auto phi_fn = [&](double x) {
    const double P = Phi_fn(x);
    return p_of(x) * P * P * inv_theta / x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    const double x = mesh->nodes[i];
    const double p = p_of(x);
    prof.Phi[i] = 1.0 / (1.0 + p);
    prof.tail[i] = p / (1.0 + p);
    prof.phi[i] = p * prof.Phi[i] * prof.Phi[i] * inv_theta / x;
  }

  const WOdeResult w = solve_w_ode(Phi_fn, phi_fn, gamma, r, alpha0, *mesh);
  prof.v = w.v;
  prof.w_boundary = std::abs(w.boundary_W);

  prof.v_residual = value_equation_residual(prof.v, prof.sigma, prof.Phi, prof.phi,
                                            LearningTech::constant_rate(alpha0), gamma, r,
                                            *mesh);
  require(prof.v_residual <= 1e-4, Errc::ResidualTooLarge,
          "bgp_constant_alpha: value plug-back residual " +
              std::to_string(prof.v_residual) +
              " exceeds 1e-4 (enlarge x_max or refine the mesh)");

  // Phi satisfies the balance law analytically; record the quadrature
  // plug-back for the summary.
  {
    std::vector<double> aphi(n);
    for (std::size_t i = 0; i < n; ++i) aphi[i] = alpha0 * prof.phi[i];
    const std::vector<double> C = cumulative_trapezoid(aphi, *mesh);
    const double c0 = alpha0 * prof.Phi[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = mesh->nodes[i];
      const double res = gamma * prof.phi[i] * x - prof.tail[i] * (C[i] + c0);
      worst = std::max(worst, std::abs(res) / (1.0 + x));
    }
    prof.phi_residual = worst;
  }

  prof.k_tail = fit_tail_constant(prof.tail, theta, *mesh);
  prof.iterations = 1;
  prof.converged = true;
  return prof;
}

BgpProfile bgp_general(std::span<const double> sigma, const LearningTech& tech,
                       double theta, MeshPtr mesh, double tol, double r, double k_anchor,
                       int max_iter) {
  require(mesh != nullptr, Errc::MeshMismatch, "bgp_general: null mesh");
  const std::size_t n = mesh->size();
  require(sigma.size() == n, Errc::DimensionMismatch, "bgp_general: sigma/mesh size mismatch");
  require(theta > 0.0, Errc::InvalidParam, "bgp_general: theta must be positive");
  if (theta >= 1.0)
    log_warn("bgp_general: theta >= 1 leaves Phi' unbounded; results are untested there");
  require(tol > 0.0 && k_anchor > 0.0 && max_iter >= 1, Errc::InvalidParam,
          "bgp_general: bad tolerance/anchor/iteration budget");
  require(tech.kind() != LearningTech::Kind::SpatialRule, Errc::InvalidTech,
          "bgp_general: needs alpha as a function of the strategy");
  require(mesh->z_min > 0.0, Errc::InvalidParam, "bgp_general: needs z_min > 0");

  require(sigma[0] >= 1.0 - 1e-12, Errc::InvalidParam,
          "bgp_general: sigma must equal 1 on a leading interval");
  for (std::size_t i = 0; i + 1 < n; ++i)
    require(sigma[i + 1] <= sigma[i] + 1e-12, Errc::InvalidParam,
            "bgp_general: sigma must be non-increasing");
  for (double s : sigma)
    require(s >= 0.0 && s <= 1.0 + 1e-12, Errc::InvalidParam,
            "bgp_general: sigma outside [0,1]");

  std::size_t i0 = 0;
  while (i0 + 1 < n && sigma[i0 + 1] >= 1.0 - 1e-12) ++i0;
  const double x0 = mesh->nodes[i0];
  const double alpha1 = tech.alpha_of(1.0);
  require(alpha1 > 0.0, Errc::InvalidParam, "bgp_general: alpha(1) must be positive");
  const double b = 1.0 / k_anchor;

  const std::vector<double> sigma_v(sigma.begin(), sigma.end());
  auto sigma_fn = [&mesh, &sigma_v](double x) {
    if (x <= mesh->z_min) return sigma_v.front();
    if (x >= mesh->z_max) return sigma_v.back();
    return mesh->interpolate(sigma_v, x);
  };
  auto g_fn = [&](double x) { return tech.alpha_of(sigma_fn(x)); };

  std::vector<double> Phi(n), phi(n), tail(n), C_nodes(n);

  // One pass: closed form with exponent a = alpha(1)/gamma up to x0, then the
  // tail-complement system Q' = -Q C / (gamma x), C' = alpha(sigma) Q C / (gamma x)
  // outward. Returns the growth identity evaluated on the result.
  auto build = [&](double gamma) {
    const double a = alpha1 / gamma;
    for (std::size_t i = 0; i <= i0; ++i) {
      const double x = mesh->nodes[i];
      const double p = b * std::exp(a * std::log(x));
      Phi[i] = p / (1.0 + p);
      tail[i] = 1.0 / (1.0 + p);
      phi[i] = a * Phi[i] * tail[i] / x;
      C_nodes[i] = alpha1 * Phi[i];
    }
    const Rhs2 rhs = [&](double x, const State2& y, State2& dy) {
      const double slope = y[0] * y[1] / (gamma * x);
      dy[0] = -slope;
      dy[1] = g_fn(x) * slope;
    };
    State2 y{tail[i0], C_nodes[i0]};
    for (std::size_t i = i0 + 1; i < n; ++i) {
      y = integrate_cell(mesh->nodes[i - 1], mesh->nodes[i], y, rhs, kOdeTol);
      tail[i] = y[0];
      Phi[i] = 1.0 - y[0];
      C_nodes[i] = y[1];
      phi[i] = y[0] * y[1] / (gamma * mesh->nodes[i]);
    }
    return gamma_from_profile(phi, sigma, tech, theta, *mesh);
  };

  double gamma = theta * alpha1;  // sigma == 1 guess
  int iterations = 0;
  bool converged = false;
  for (int m = 1; m <= max_iter; ++m) {
    const double gamma_next = build(gamma);
    iterations = m;
    const double delta = std::abs(gamma_next - gamma);
    gamma = gamma_next;
    if (delta <= tol * gamma) {
      converged = true;
      break;
    }
  }
  require(converged, Errc::NotConverged,
          "bgp_general: gamma iteration did not settle in " + std::to_string(max_iter) +
              " iterations");
  // Rebuild once at the converged rate so the arrays and gamma agree.
  const double gamma_check = build(gamma);

  BgpProfile prof;
  prof.mesh = mesh;
  prof.gamma = gamma;
  prof.theta = theta;
  prof.Phi = Phi;
  prof.phi = phi;
  prof.tail = tail;
  prof.sigma = sigma_v;
  prof.iterations = iterations;
  prof.converged = true;
  log_debug("bgp_general: gamma=" + std::to_string(gamma) + " consistency delta=" +
            std::to_string(std::abs(gamma_check - gamma)));

  prof.k_tail = fit_tail_constant(tail, theta, *mesh);

  // Plug-back of the balance law gamma phi x = (mass - Phi) int_0^x alpha(sigma) phi,
  // with the running integral re-derived by quadrature from the outputs.
  {
    std::vector<double> gphi(n);
    for (std::size_t i = 0; i < n; ++i) gphi[i] = tech.alpha_of(sigma_v[i]) * phi[i];
    const std::vector<double> C = cumulative_trapezoid(gphi, *mesh);
    const double c0 = alpha1 * Phi[0];  // mass below the mesh, closed-form branch
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = mesh->nodes[i];
      const double res = gamma * phi[i] * x - tail[i] * (C[i] + c0);
      worst = std::max(worst, std::abs(res) / (1.0 + x));
    }
    prof.phi_residual = worst;
  }

  prof.r = r;
  if (r <= gamma)
    log_warn("bgp_general: r <= gamma; value may not decay");
  const std::vector<double> Phi_copy = Phi;
  const std::vector<double> phi_copy = phi;
  auto Phi_fn = [&mesh, &Phi_copy](double x) { return mesh->interpolate(Phi_copy, x); };
  auto phi_fn = [&mesh, &phi_copy](double x) { return mesh->interpolate(phi_copy, x); };
  prof.v = solve_v_given_sigma(sigma_fn, Phi_fn, phi_fn, tech, gamma, r, *mesh);
  prof.v_residual = value_equation_residual(prof.v, prof.sigma, prof.Phi, prof.phi, tech,
                                            gamma, r, *mesh);
  return prof;
}

}  // namespace kinexus::bgp
