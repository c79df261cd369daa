#include "kinexus/kinetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "kinexus/kernels.hpp"

namespace kinexus {

namespace {

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    require(std::isfinite(x), Errc::NonFiniteInput, std::string(what) + " has a non-finite entry");
}

}  // namespace

DensityField make_density(MeshPtr mesh, std::vector<double> values) {
  require(mesh != nullptr, Errc::MeshMismatch, "make_density: null mesh");
  require(values.size() == mesh->size(), Errc::DimensionMismatch,
          "make_density: values/mesh size mismatch");
  for (double v : values) {
    require(std::isfinite(v), Errc::NonFiniteInput, "make_density: non-finite value");
    require(v >= 0.0, Errc::NegativeDensity, "make_density: negative value");
  }
  DensityField f;
  f.mesh = std::move(mesh);
  f.values = std::move(values);
  f.mass = integrate(f.values, *f.mesh);
  return f;
}

StrategyField make_strategy(MeshPtr mesh, std::vector<double> values) {
  require(mesh != nullptr, Errc::MeshMismatch, "make_strategy: null mesh");
  require(values.size() == mesh->size(), Errc::DimensionMismatch,
          "make_strategy: values/mesh size mismatch");
  for (double v : values)
    require(std::isfinite(v) && v >= 0.0 && v <= 1.0, Errc::InvalidParam,
            "make_strategy: value outside [0,1]");
  return StrategyField{std::move(mesh), std::move(values)};
}

namespace kinetic {

std::vector<double> collision_rhs(const DensityField& f,
                                  std::span<const double> alpha_at_nodes, double beta) {
  const Mesh& mesh = *f.mesh;
  require(alpha_at_nodes.size() == mesh.size(), Errc::DimensionMismatch,
          "collision_rhs: alpha/mesh size mismatch");
  require(beta >= 0.0 && beta <= 1.0, Errc::InvalidParam, "collision_rhs: beta outside [0,1]");
  check_finite(f.values, "density");
  check_finite(alpha_at_nodes, "alpha");

  const std::size_t n = mesh.size();
  std::vector<double> af(n), lf(n), uf(n), laf(n), uaf(n), out(n);
  for (std::size_t i = 0; i < n; ++i) af[i] = alpha_at_nodes[i] * f.values[i];
  partial_integrals_into(f.values, mesh, lf, uf);
  partial_integrals_into(af, mesh, laf, uaf);
  kernels::collision_rhs(f.values, alpha_at_nodes, lf, uf, laf, uaf, beta, out);
  return out;
}

DensityStepper::DensityStepper(MeshPtr mesh, double beta) : mesh_(std::move(mesh)), beta_(beta) {
  require(mesh_ != nullptr, Errc::MeshMismatch, "DensityStepper: null mesh");
  require(beta_ >= 0.0 && beta_ <= 1.0, Errc::InvalidParam, "DensityStepper: beta outside [0,1]");
  const std::size_t n = mesh_->size();
  af_.resize(n);
  lower_f_.resize(n);
  upper_f_.resize(n);
  lower_af_.resize(n);
  upper_af_.resize(n);
  k1_.resize(n);
  k2_.resize(n);
  stage_.resize(n);
}

void DensityStepper::rhs_into(std::span<const double> f, std::span<const double> alpha,
                              std::span<double> out) {
  const std::size_t n = mesh_->size();
  for (std::size_t i = 0; i < n; ++i) af_[i] = alpha[i] * f[i];
  partial_integrals_into(f, *mesh_, lower_f_, upper_f_);
  partial_integrals_into(af_, *mesh_, lower_af_, upper_af_);
  kernels::collision_rhs(f, alpha, lower_f_, upper_f_, lower_af_, upper_af_, beta_, out);
}

DensityField DensityStepper::step(const DensityField& f, std::span<const double> alpha_now,
                                  std::span<const double> alpha_next, double dt) {
  const std::size_t n = mesh_->size();
  require(f.mesh.get() == mesh_.get(), Errc::MeshMismatch, "step: foreign mesh");
  require(alpha_now.size() == n && alpha_next.size() == n, Errc::DimensionMismatch,
          "step: alpha size mismatch");
  require(dt > 0.0, Errc::InvalidParam, "step: dt must be positive");

  const double max_f = *std::max_element(f.values.begin(), f.values.end());
  const double floor = -kPositivityTol * max_f;

  auto check_stage = [&](std::span<const double> v, const char* stage) {
    for (double x : v) {
      require(std::isfinite(x), Errc::NonFiniteInput,
              std::string("step: non-finite density in ") + stage);
      require(x >= floor, Errc::PositivityViolation,
              std::string("step: negative density in ") + stage +
                  " (dt too large; reduce the time step)");
    }
  };

  rhs_into(f.values, alpha_now, k1_);
  kernels::weighted_update(f.values, dt, k1_, 0.0, {}, stage_);
  check_stage(stage_, "predictor");
  rhs_into(stage_, alpha_next, k2_);

  DensityField out;
  out.mesh = mesh_;
  out.values.resize(n);
  kernels::weighted_update(f.values, 0.5 * dt, k1_, 0.5 * dt, k2_, out.values);
  check_stage(out.values, "corrector");
  // Roundoff floor only: genuine undershoots were rejected above.
  for (double& v : out.values)
    if (v < 0.0) v = 0.0;
  out.mass = integrate(out.values, *mesh_);
  return out;
}

DensityField step_density(const DensityField& f, std::span<const double> alpha_at_nodes,
                          double beta, double dt) {
  DensityStepper stepper(f.mesh, beta);
  return stepper.step(f, alpha_at_nodes, alpha_at_nodes, dt);
}

std::vector<DensityField> simulate_density(const DensityField& f0,
                                           std::span<const double> alpha_at_nodes,
                                           double beta, const TimeAxis& time) {
  require(time.n_steps >= 1 && time.t_final > 0.0, Errc::InvalidParam,
          "simulate_density: bad time axis");
  const double dt = time.dt();
  const double max_alpha =
      *std::max_element(alpha_at_nodes.begin(), alpha_at_nodes.end());
  require(dt * (1.0 + beta) * max_alpha * f0.mass < 1.0, Errc::InvalidParam,
          "simulate_density: dt violates the positivity bound");

  DensityStepper stepper(f0.mesh, beta);
  std::vector<DensityField> path;
  path.reserve(static_cast<std::size_t>(time.n_steps) + 1);
  path.push_back(f0);
  for (int k = 0; k < time.n_steps; ++k)
    path.push_back(stepper.step(path.back(), alpha_at_nodes, alpha_at_nodes, dt));
  return path;
}

std::vector<double> cdf(const DensityField& f) {
  return cumulative_trapezoid(f.values, *f.mesh);
}

std::vector<double> evolve_cdf_constant_alpha(std::span<const double> F0, double alpha0,
                                              double t) {
  require(alpha0 >= 0.0 && t >= 0.0, Errc::InvalidParam,
          "evolve_cdf_constant_alpha: need alpha0 >= 0 and t >= 0");
  require(!F0.empty(), Errc::DimensionMismatch, "evolve_cdf_constant_alpha: empty CDF");
  // The logistic solution assumes probability normalization.
  require(std::abs(F0.back() - 1.0) <= 1e-8, Errc::OracleDomain,
          "evolve_cdf_constant_alpha: CDF mass must be 1, got " +
              std::to_string(F0.back()));
  const double growth = std::exp(alpha0 * t);
  std::vector<double> out(F0.size());
  for (std::size_t i = 0; i < F0.size(); ++i) {
    const double f0 = F0[i];
    require(f0 >= -1e-12 && f0 <= 1.0 + 1e-12, Errc::OracleDomain,
            "evolve_cdf_constant_alpha: CDF value outside [0,1]");
    out[i] = f0 / (f0 + (1.0 - f0) * growth);
  }
  return out;
}

double first_moment(const DensityField& f) {
  const Mesh& mesh = *f.mesh;
  double acc = 0.0;
  for (std::size_t i = 0; i < mesh.size(); ++i)
    acc += mesh.weights[i] * mesh.nodes[i] * f.values[i];
  return acc;
}

double tail_mass(const DensityField& f, double z0, double* z_used) {
  const Mesh& mesh = *f.mesh;
  require(z0 >= mesh.z_min && z0 <= mesh.z_max, Errc::InvalidParam,
          "tail_mass: z0 outside the mesh");
  const std::size_t i0 = mesh.nearest(z0);
  if (z_used != nullptr) *z_used = mesh.nodes[i0];
  double below = 0.0;
  for (std::size_t i = 1; i <= i0; ++i)
    below += 0.5 * (mesh.nodes[i] - mesh.nodes[i - 1]) * (f.values[i] + f.values[i - 1]);
  return f.mass - below;
}

DensityField frechet_initial_density(MeshPtr mesh, double k, double theta) {
  require(mesh != nullptr, Errc::MeshMismatch, "frechet_initial_density: null mesh");
  require(k > 0.0 && theta > 0.0, Errc::InvalidParam,
          "frechet_initial_density: need k > 0 and theta > 0");
  require(mesh->z_min > 0.0, Errc::InvalidParam,
          "frechet_initial_density: needs z_min > 0");
  const std::size_t n = mesh->size();
  std::vector<double> values(n);
  const double inv_theta = 1.0 / theta;
  for (std::size_t i = 0; i < n; ++i) {
    const double z = mesh->nodes[i];
    // f(z) = (k/theta) z^{-(1+1/theta)} exp(-k z^{-1/theta}); underflows to 0
    // near the left edge, which is the correct limit.
    const double zpow = std::exp(-inv_theta * std::log(z));  // z^{-1/theta}
    values[i] = (k * inv_theta) * (zpow / z) * std::exp(-k * zpow);
  }
  const double mass = integrate(values, *mesh);
  require(mass > 0.0, Errc::InvalidParam,
          "frechet_initial_density: zero mass on this mesh");
  for (double& v : values) v /= mass;
  return make_density(std::move(mesh), std::move(values));
}

}  // namespace kinetic
}  // namespace kinexus
