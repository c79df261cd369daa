#include "kinexus/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinexus/log.hpp"

namespace kinexus::mfg {

namespace {

// sup_i |a_i - b_i| / weight_i
double sup_distance(const std::vector<double>& a, const std::vector<double>& b,
                    const std::vector<double>* inv_weight) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    double e = std::abs(a[i] - b[i]);
    if (inv_weight != nullptr) e *= (*inv_weight)[i];
    d = std::max(d, e);
  }
  return d;
}

}  // namespace

double production(const DensityField& f, const StrategyField& s) {
  require(f.mesh.get() == s.mesh.get(), Errc::MeshMismatch,
          "production: fields live on different meshes");
  const Mesh& mesh = *f.mesh;
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    acc += mesh.weights[i] * (1.0 - s.values[i]) * mesh.nodes[i] * f.values[i];
  return acc;
}

MfgSolution solve_mfg(const DensityField& f0, const MfgParams& params) {
  const MeshPtr mesh = f0.mesh;
  const std::size_t n = mesh->size();
  const int K = params.time.n_steps;
  const double dt = params.time.dt();

  require(K >= 1 && params.time.t_final > 0.0, Errc::InvalidParam, "solve_mfg: bad time axis");
  require(params.tol > 0.0, Errc::InvalidParam, "solve_mfg: tol must be positive");
  require(params.max_iter >= 1, Errc::InvalidParam, "solve_mfg: max_iter must be >= 1");
  require(params.relaxation > 0.0 && params.relaxation <= 1.0, Errc::InvalidParam,
          "solve_mfg: relaxation must lie in (0,1]");
  require(std::abs(f0.mass - 1.0) <= 1e-8, Errc::InvalidParam,
          "solve_mfg: initial density must be mass-normalized");
  const double max_alpha = params.tech.max_alpha();
  require(dt * (1.0 + params.beta) * max_alpha * f0.mass < 1.0, Errc::InvalidParam,
          "solve_mfg: dt violates the density positivity bound");
  require(dt * (params.r + max_alpha * f0.mass) < 1.0, Errc::InvalidParam,
          "solve_mfg: dt violates the backward stability bound");

  const std::size_t steps = static_cast<std::size_t>(K) + 1;

  // Strategy path S(t_k), initialized to no learning.
  std::vector<std::vector<double>> S(steps, std::vector<double>(n, 0.0));
  std::vector<std::vector<double>> alpha(steps, std::vector<double>(n, 0.0));

  // Previous-iterate references for the residuals. The virtual iterate zero
  // is "nothing happens": density frozen at f0, value identically 0.
  std::vector<std::vector<double>> prev_F(steps, kinetic::cdf(f0));
  std::vector<std::vector<double>> prev_V(steps, std::vector<double>(n, 0.0));

  std::vector<double> inv_weight(n);
  for (std::size_t i = 0; i < n; ++i) inv_weight[i] = 1.0 / (1.0 + mesh->nodes[i]);

  kinetic::DensityStepper density_stepper(mesh, params.beta);
  hjb::ValueStepper value_stepper(mesh, params.tech, params.r);

  auto forward = [&](std::vector<DensityField>& path) {
    path.clear();
    path.reserve(steps);
    path.push_back(f0);
    for (int k = 0; k < K; ++k)
      path.push_back(density_stepper.step(path.back(), alpha[k], alpha[k + 1], dt));
  };

  std::vector<DensityField> f_path;
  std::vector<ValueField> V_path(steps);
  std::vector<std::vector<double>> S_new(steps, std::vector<double>(n, 0.0));

  MfgSolution sol;
  for (int m = 1; m <= params.max_iter; ++m) {
    for (std::size_t k = 0; k < steps; ++k)
      params.tech.alpha_at_nodes(S[k], std::span<double>(alpha[k]));
    forward(f_path);

    // Backward sweep against the frozen density path; terminal value is 0.
    V_path[steps - 1] = ValueField{mesh, std::vector<double>(n, 0.0)};
    for (int k = K; k >= 1; --k) {
      auto [V_prev, S_k] =
          value_stepper.step(V_path[static_cast<std::size_t>(k)],
                             f_path[static_cast<std::size_t>(k)], dt);
      V_path[static_cast<std::size_t>(k) - 1] = std::move(V_prev);
      S_new[static_cast<std::size_t>(k)] = std::move(S_k.values);
    }
    S_new[0] = value_stepper.control_for(V_path[0], f_path[0]).values;

    if (params.relaxation < 1.0) {
      const double w = params.relaxation;
      for (std::size_t k = 0; k < steps; ++k)
        for (std::size_t i = 0; i < n; ++i)
          S_new[k][i] = (1.0 - w) * S[k][i] + w * S_new[k][i];
    }
    S.swap(S_new);

    IterationResidual res;
    for (std::size_t k = 0; k < steps; ++k) {
      const std::vector<double> F_k = kinetic::cdf(f_path[k]);
      res.delta_F = std::max(res.delta_F, sup_distance(F_k, prev_F[k], nullptr));
      res.delta_V =
          std::max(res.delta_V, sup_distance(V_path[k].values, prev_V[k], &inv_weight));
      prev_F[k] = F_k;
      prev_V[k] = V_path[k].values;
    }
    sol.residuals.push_back(res);
    sol.iterations = m;
    log_debug("picard iteration " + std::to_string(m) + ": dF=" +
              std::to_string(res.delta_F) + " dV=" + std::to_string(res.delta_V));
    if (res.delta_F < params.tol && res.delta_V < params.tol) {
      sol.converged = true;
      break;
    }
  }

  if (!sol.converged)
    log_warn("solve_mfg: not converged after " + std::to_string(sol.iterations) +
             " iterations");

  // One more forward sweep under the final strategy so the returned density,
  // strategy and production series belong to the same iterate. At
  // convergence this moves the CDFs by less than tol.
  for (std::size_t k = 0; k < steps; ++k)
    params.tech.alpha_at_nodes(S[k], std::span<double>(alpha[k]));
  forward(f_path);

  sol.density_path = std::move(f_path);
  sol.value_path = std::move(V_path);
  sol.strategy_path.reserve(steps);
  sol.production_series.reserve(steps);
  for (std::size_t k = 0; k < steps; ++k) {
    sol.strategy_path.push_back(StrategyField{mesh, std::move(S[k])});
    sol.production_series.push_back(
        production(sol.density_path[k], sol.strategy_path[k]));
  }
  return sol;
}

PerturbedDensity perturb_density(const DensityField& f0, double amplitude, double freq,
                                 std::pair<double, double> window) {
  const Mesh& mesh = *f0.mesh;
  require(std::isfinite(amplitude) && std::isfinite(freq), Errc::InvalidParam,
          "perturb_density: non-finite parameters");
  require(window.first < window.second, Errc::InvalidParam,
          "perturb_density: empty window");

  std::vector<double> values = f0.values;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double z = mesh.nodes[i];
    if (z < window.first || z > window.second) continue;
    values[i] += amplitude * (1.0 - z) * std::sin(freq * M_PI * z);
    require(values[i] >= 0.0, Errc::NegativeDensity,
            "perturb_density: perturbation drives node " + std::to_string(i) +
                " negative");
  }

  const double mass = integrate(values, mesh);
  const double raw_delta = mass - f0.mass;
  if (std::abs(raw_delta) > 1e-10) {
    const double scale = f0.mass / mass;
    for (double& v : values) v *= scale;
  }
  return PerturbedDensity{make_density(f0.mesh, std::move(values)), raw_delta};
}

}  // namespace kinexus::mfg
