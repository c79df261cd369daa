#pragma once

#include <span>
#include <utility>
#include <vector>

#include "kinexus/control.hpp"
#include "kinexus/grid.hpp"
#include "kinexus/kinetic.hpp"

namespace kinexus {

/// Value function V(z_i). Evolved backward from non-negative, non-decreasing
/// terminal data it stays non-negative and non-decreasing.
struct ValueField {
  MeshPtr mesh;
  std::vector<double> values;
};

/// Expected gain from meeting somebody more knowledgeable,
/// B(z) = int_z^zmax (V(y) - V(z)) f(y) dy. Non-negative and non-increasing
/// whenever V is non-negative and non-decreasing; B(z_max) == 0 exactly.
struct GainField {
  MeshPtr mesh;
  std::vector<double> values;
};

ValueField make_value(MeshPtr mesh, std::vector<double> values);

namespace hjb {

/// Slack for the preserved-shape checks (non-negativity, monotonicity),
/// relative to the local value scale.
inline constexpr double kShapeTol = 1e-10;

GainField compute_gain(const ValueField& V, const DensityField& f);

/// d/dt V = r V - [(1 - S) z + alpha(S) B(V, f)].
/// S must be the optimal control for (V, f); this is re-derived and any node
/// off by more than 1e-10 raises ControlInconsistent.
std::vector<double> hjb_rhs(const ValueField& V, const DensityField& f,
                            const StrategyField& S, const LearningTech& tech, double r);

/// Owns scratch arrays for a backward sweep on one mesh.
class ValueStepper {
 public:
  ValueStepper(MeshPtr mesh, LearningTech tech, double r);

  /// One explicit backward Euler step:
  ///   V_prev = V_next - dt * (r V_next - [(1-S) z + alpha(S) B]),
  /// with S the pointwise optimal control against B(V_next, f).
  /// Preserves V >= 0 and monotonicity in z when dt (r + max alpha * mass) < 1.
  std::pair<ValueField, StrategyField> step(const ValueField& V_next,
                                            const DensityField& f, double dt);

  /// Optimal control field against B(V, f) without stepping (used for the
  /// initial time slice).
  StrategyField control_for(const ValueField& V, const DensityField& f);

  /// Gain field from the last step/control_for call.
  const std::vector<double>& last_gain() const { return gain_; }

 private:
  void gain_into(const ValueField& V, const DensityField& f);

  MeshPtr mesh_;
  LearningTech tech_;
  double r_;
  std::vector<double> vf_, upper_f_, upper_vf_, gain_, s_, alpha_s_;
};

std::pair<ValueField, StrategyField> step_value_backward(const ValueField& V_next,
                                                         const DensityField& f_at_step,
                                                         const LearningTech& tech,
                                                         double r, double dt);

}  // namespace hjb
}  // namespace kinexus
