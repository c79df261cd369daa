#include "kinexus/hjb.hpp"

#include <cmath>
#include <string>

#include "kinexus/kernels.hpp"

namespace kinexus {

ValueField make_value(MeshPtr mesh, std::vector<double> values) {
  require(mesh != nullptr, Errc::MeshMismatch, "make_value: null mesh");
  require(values.size() == mesh->size(), Errc::DimensionMismatch,
          "make_value: values/mesh size mismatch");
  for (double v : values)
    require(std::isfinite(v), Errc::NonFiniteInput, "make_value: non-finite value");
  return ValueField{std::move(mesh), std::move(values)};
}

namespace hjb {

Control optimal_control(double z, double B, const LearningTech& tech) {
  require(std::isfinite(z) && z >= 0.0, Errc::InvalidParam,
          "optimal_control: z must be finite and non-negative");
  require(std::isfinite(B), Errc::NonFiniteInput, "optimal_control: B not finite");

  switch (tech.kind()) {
    case LearningTech::Kind::ConstantRate:
      // alpha does not respond to s, so working all the time is optimal
      // (tie at z = 0 resolves to the smaller s).
      return {0.0, tech.alpha0()};
    case LearningTech::Kind::PowerLaw:
      break;
    default:
      fail(Errc::InvalidTech, "optimal_control: spatial rules carry no strategy");
  }

  if (B <= 0.0) return {0.0, 0.0};
  if (z <= 0.0) return {1.0, tech.alpha0()};

  const double n = tech.exponent();
  const double ratio = z / (tech.alpha0() * n * B);
  // Stationary point of (1-s) z + alpha0 s^n B; the exponent 1/(n-1) is
  // negative, so ratio >= 1 already means the cutoff s = 1.
  double s = std::pow(ratio, 1.0 / (n - 1.0));
  if (s >= 1.0) return {1.0, tech.alpha0()};
  return {s, tech.alpha_of(s)};
}

namespace {

// B_i = sum_{j>i} w_j f_j (V_j - V_i). This is the half-weight upper partial
// with the self-terms dropped; they cancel between the two partials
// analytically, and dropping them keeps B(z_max) == 0 and B >= 0 exact for
// monotone V.
void strict_suffix_sums(std::span<const double> f, std::span<const double> vf,
                        const Mesh& mesh, std::span<double> suffix_f,
                        std::span<double> suffix_vf) {
  double acc_f = 0.0, acc_vf = 0.0;
  for (std::size_t i = mesh.size(); i-- > 0;) {
    suffix_f[i] = acc_f;
    suffix_vf[i] = acc_vf;
    acc_f += mesh.weights[i] * f[i];
    acc_vf += mesh.weights[i] * vf[i];
  }
}

}  // namespace

GainField compute_gain(const ValueField& V, const DensityField& f) {
  require(V.mesh.get() == f.mesh.get(), Errc::MeshMismatch,
          "compute_gain: fields live on different meshes");
  const Mesh& mesh = *V.mesh;
  const std::size_t n = mesh.size();
  std::vector<double> vf(n), suffix_f(n), suffix_vf(n), out(n);
  for (std::size_t i = 0; i < n; ++i) vf[i] = V.values[i] * f.values[i];
  strict_suffix_sums(f.values, vf, mesh, suffix_f, suffix_vf);
  kernels::gain_combine(V.values, suffix_f, suffix_vf, out);
  return GainField{V.mesh, std::move(out)};
}

std::vector<double> hjb_rhs(const ValueField& V, const DensityField& f,
                            const StrategyField& S, const LearningTech& tech, double r) {
  require(V.mesh.get() == f.mesh.get() && V.mesh.get() == S.mesh.get(),
          Errc::MeshMismatch, "hjb_rhs: fields live on different meshes");
  const Mesh& mesh = *V.mesh;
  const GainField B = compute_gain(V, f);
  std::vector<double> out(mesh.size());
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const Control c = optimal_control(mesh.nodes[i], B.values[i], tech);
    require(std::abs(c.s - S.values[i]) <= 1e-10, Errc::ControlInconsistent,
            "hjb_rhs: strategy at node " + std::to_string(i) +
                " is not the optimal control");
    out[i] = r * V.values[i] - ((1.0 - c.s) * mesh.nodes[i] + c.alpha * B.values[i]);
  }
  return out;
}

ValueStepper::ValueStepper(MeshPtr mesh, LearningTech tech, double r)
    : mesh_(std::move(mesh)), tech_(std::move(tech)), r_(r) {
  require(mesh_ != nullptr, Errc::MeshMismatch, "ValueStepper: null mesh");
  require(std::isfinite(r_) && r_ >= 0.0, Errc::InvalidParam,
          "ValueStepper: discount rate must be non-negative");
  const std::size_t n = mesh_->size();
  vf_.resize(n);
  upper_f_.resize(n);
  upper_vf_.resize(n);
  gain_.resize(n);
  s_.resize(n);
  alpha_s_.resize(n);
}

void ValueStepper::gain_into(const ValueField& V, const DensityField& f) {
  require(V.mesh.get() == mesh_.get() && f.mesh.get() == mesh_.get(), Errc::MeshMismatch,
          "ValueStepper: foreign mesh");
  const std::size_t n = mesh_->size();
  for (std::size_t i = 0; i < n; ++i) vf_[i] = V.values[i] * f.values[i];
  strict_suffix_sums(f.values, vf_, *mesh_, upper_f_, upper_vf_);
  kernels::gain_combine(V.values, upper_f_, upper_vf_, gain_);
}

StrategyField ValueStepper::control_for(const ValueField& V, const DensityField& f) {
  gain_into(V, f);
  kernels::control_sweep(mesh_->nodes, gain_, tech_, s_, alpha_s_);
  return StrategyField{mesh_, std::vector<double>(s_.begin(), s_.end())};
}

std::pair<ValueField, StrategyField> ValueStepper::step(const ValueField& V_next,
                                                        const DensityField& f, double dt) {
  require(dt > 0.0, Errc::InvalidParam, "ValueStepper: dt must be positive");
  gain_into(V_next, f);
  kernels::control_sweep(mesh_->nodes, gain_, tech_, s_, alpha_s_);

  ValueField V_prev;
  V_prev.mesh = mesh_;
  V_prev.values.resize(mesh_->size());
  kernels::value_backward_update(V_next.values, mesh_->nodes, s_, alpha_s_, gain_, r_, dt,
                                 V_prev.values);

  // Shape diagnostics: reported, never clamped. Both are preserved exactly
  // under the stability bound dt (r + max alpha * mass) < 1, so a hit here
  // means the configuration is outside that bound.
  const std::size_t n = mesh_->size();
  for (std::size_t i = 0; i < n; ++i) {
    const double scale = 1.0 + mesh_->nodes[i];
    require(V_prev.values[i] >= -kShapeTol * scale, Errc::PositivityViolation,
            "backward step lost V >= 0 at node " + std::to_string(i));
    if (i > 0)
      require(V_prev.values[i] - V_prev.values[i - 1] >= -kShapeTol * scale,
              Errc::MonotonicityViolation,
              "backward step lost monotonicity at node " + std::to_string(i));
  }

  return {std::move(V_prev), StrategyField{mesh_, std::vector<double>(s_.begin(), s_.end())}};
}

std::pair<ValueField, StrategyField> step_value_backward(const ValueField& V_next,
                                                         const DensityField& f_at_step,
                                                         const LearningTech& tech,
                                                         double r, double dt) {
  ValueStepper stepper(V_next.mesh, tech, r);
  return stepper.step(V_next, f_at_step, dt);
}

}  // namespace hjb
}  // namespace kinexus
