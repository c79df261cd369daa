#pragma once

#include <span>
#include <vector>

#include "kinexus/error.hpp"

namespace kinexus {

/// Learning technology alpha: the meeting rate as a function of the learning
/// effort s, or a fixed spatial rule alpha(z_i) independent of effort.
///
///   PowerLaw      alpha(s) = alpha0 * s^n, n in (0,1)
///   ConstantRate  alpha(s) = alpha0
///   SpatialRule   alpha tabulated per node, values in [0,1]
///
/// power_law with n == 0 degrades to ConstantRate: the interior optimizer
/// formula has a singular exponent 1/(n-1) ... at n -> 1 and its derivation
/// assumes n in (0,1), while n = 0 has the closed-form answer s = 0.
class LearningTech {
 public:
  enum class Kind { PowerLaw, ConstantRate, SpatialRule };

  static LearningTech power_law(double alpha0, double n);
  static LearningTech constant_rate(double alpha0);
  static LearningTech spatial_rule(std::vector<double> alpha_at_nodes);

  Kind kind() const { return kind_; }
  double alpha0() const { return alpha0_; }
  double exponent() const { return n_; }
  const std::vector<double>& table() const { return table_; }

  /// True when alpha genuinely responds to the strategy (PowerLaw).
  bool depends_on_strategy() const { return kind_ == Kind::PowerLaw; }

  /// alpha(s). Invalid for SpatialRule.
  double alpha_of(double s) const;

  /// alpha'(1) = alpha0 * n for PowerLaw (the strategy cutoff slope).
  double alpha_prime_at_one() const;

  /// Largest value alpha can take (used for time-step bounds).
  double max_alpha() const;

  /// alpha at every node given the per-node strategy. SpatialRule ignores s.
  void alpha_at_nodes(std::span<const double> s, std::span<double> out) const;

 private:
  Kind kind_ = Kind::ConstantRate;
  double alpha0_ = 0.0;
  double n_ = 0.0;
  std::vector<double> table_;
};

}  // namespace kinexus
