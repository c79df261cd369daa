#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kinexus/grid.hpp"
#include "kinexus/tech.hpp"

namespace kinexus::bgp {

/// A balanced-growth-path solution in the rescaled variable x = z e^{-gamma t}:
/// Phi is the CDF of the rescaled density phi, v the rescaled value, sigma the
/// rescaled strategy. tail = mass - Phi is carried explicitly so the Pareto
/// tail survives cancellation.
struct BgpProfile {
  MeshPtr mesh;
  double gamma = 0.0;
  double theta = 0.0;
  double k_tail = 0.0;
  double r = 0.0;
  std::vector<double> Phi;
  std::vector<double> phi;
  std::vector<double> v;
  std::vector<double> sigma;
  std::vector<double> tail;
  int iterations = 0;
  bool converged = false;
  double phi_residual = 0.0;  // plug-back residual of the Phi balance law
  double v_residual = 0.0;    // plug-back residual of the value equation
  double w_boundary = 0.0;    // |W(x_max)| after shooting (constant-alpha route)
};

/// Growth rate identity: gamma = theta * int alpha(sigma(y)) phi(y) dy
/// (truncated trapezoid quadrature on the mesh).
double gamma_from_profile(std::span<const double> phi, std::span<const double> sigma,
                          const LearningTech& tech, double theta, const Mesh& mesh);

struct WOdeResult {
  std::vector<double> W;  // W(x) = int_x^xmax v phi dy, from the shot ODE
  std::vector<double> w;  // w = -W' = v phi, via the ODE's algebraic relation
  std::vector<double> v;  // v = w / phi
  std::vector<double> H;  // antiderivative of x Phi', anchored H(x_max) = 0
  double K = 0.0;         // integration constant in the x_max-anchored convention
  double boundary_W = 0.0;
  int shots = 0;
};

/// Backward first-order problem (gamma - r) W - gamma W' x = H + alpha0 Phi W + K
/// with W(x_max) = 0, solved by one-dimensional shooting on K: the solution is
/// started from the regular branch at the left (singular) end and K is tuned
/// by secant iteration until |W(x_max)| < 1e-10.
WOdeResult solve_w_ode(std::function<double(double)> Phi, std::function<double(double)> phi,
                       double gamma, double r, double alpha0, const Mesh& mesh);

/// Tabulated-input form; phi is rebuilt by centered differences of Phi.
WOdeResult solve_w_ode(std::span<const double> Phi, double gamma, double r, double alpha0,
                       const Mesh& mesh);

/// (1+x)-weighted sup-norm plug-back residual of the rescaled value equation
///   (r - gamma) v + gamma v' x = (1 - sigma) x + alpha(sigma) [ int_x (v(y)-v(x)) phi dy ]
/// with v' by centered differences and the integral by the half-weight
/// quadrature, evaluated on the interior nodes. This route is independent of
/// the ODE integration that produced v.
double value_equation_residual(std::span<const double> v, std::span<const double> sigma,
                               std::span<const double> Phi, std::span<const double> phi,
                               const LearningTech& tech, double gamma, double r,
                               const Mesh& mesh);

/// Constant learning rate: gamma = theta * alpha0 (unit mass),
/// Phi(x) = 1 / (1 + k x^{-1/theta}) evaluated in closed form, sigma = 0,
/// v from the W-ODE. Throws ResidualTooLarge if the value plug-back misses 1e-4.
BgpProfile bgp_constant_alpha(double alpha0, double theta, double k_tail, double r,
                              MeshPtr mesh);

/// Given-sigma profile: sigma must be 1 on a leading interval [0, x0] and
/// non-increasing. Fixed point between gamma and Phi: the closed form with
/// exponent alpha(1)/gamma on [0, x0], the tail-complement ODE outward from
/// x0, and the growth identity to update gamma. The left-branch constant is
/// anchored as b = 1/k_anchor, so sigma == 1 reproduces the constant-alpha
/// profile with tail constant k_anchor. v solves the given-sigma value
/// equation at discount rate r by direct shooting.
BgpProfile bgp_general(std::span<const double> sigma, const LearningTech& tech,
                       double theta, MeshPtr mesh, double tol, double r = 0.06,
                       double k_anchor = 0.05, int max_iter = 50);

/// Least-squares fit of the tail constant on the last decade of the mesh with
/// the decay exponent pinned to -1/theta. The free-slope fit must agree with
/// -1/theta within 5% or NoTail is thrown.
double fit_tail_constant(std::span<const double> tail, double theta, const Mesh& mesh);

}  // namespace kinexus::bgp
