#pragma once

#include "kinexus/tech.hpp"

namespace kinexus::hjb {

struct Control {
  double s = 0.0;      // optimal learning effort in [0,1]
  double alpha = 0.0;  // alpha(s)
};

/// Pointwise maximizer of (1-s)*z + alpha(s)*B over s in [0,1].
///
/// Ties resolve to the smaller s so outputs are deterministic. Cases:
///   B <= 0                -> s = 0
///   ConstantRate          -> s = 0 (alpha does not respond to s)
///   PowerLaw, z == 0, B>0 -> s = 1
///   PowerLaw interior     -> s = min((z / (alpha0 n B))^{1/(n-1)}, 1)
Control optimal_control(double z, double B, const LearningTech& tech);

}  // namespace kinexus::hjb
