#include "kinexus/tech.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinexus {

LearningTech LearningTech::power_law(double alpha0, double n) {
  require(std::isfinite(alpha0) && alpha0 >= 0.0, Errc::InvalidTech,
          "power_law: alpha0 must be non-negative");
  require(std::isfinite(n) && n >= 0.0 && n < 1.0, Errc::InvalidTech,
          "power_law: exponent must lie in [0,1), got " + std::to_string(n));
  if (n == 0.0) return constant_rate(alpha0);
  LearningTech t;
  t.kind_ = Kind::PowerLaw;
  t.alpha0_ = alpha0;
  t.n_ = n;
  return t;
}

LearningTech LearningTech::constant_rate(double alpha0) {
  require(std::isfinite(alpha0) && alpha0 >= 0.0, Errc::InvalidTech,
          "constant_rate: alpha0 must be non-negative");
  LearningTech t;
  t.kind_ = Kind::ConstantRate;
  t.alpha0_ = alpha0;
  return t;
}

LearningTech LearningTech::spatial_rule(std::vector<double> alpha_at_nodes) {
  require(!alpha_at_nodes.empty(), Errc::InvalidTech, "spatial_rule: empty table");
  for (double a : alpha_at_nodes)
    require(std::isfinite(a) && a >= 0.0 && a <= 1.0, Errc::InvalidTech,
            "spatial_rule: entries must lie in [0,1]");
  LearningTech t;
  t.kind_ = Kind::SpatialRule;
  t.table_ = std::move(alpha_at_nodes);
  return t;
}

double LearningTech::alpha_of(double s) const {
  switch (kind_) {
    case Kind::ConstantRate:
      return alpha0_;
    case Kind::PowerLaw:
      if (s <= 0.0) return 0.0;
      if (s >= 1.0) return alpha0_;
      return alpha0_ * std::pow(s, n_);
    default:
      fail(Errc::InvalidTech, "alpha_of(s) undefined for a spatial rule");
  }
}

double LearningTech::alpha_prime_at_one() const {
  require(kind_ == Kind::PowerLaw, Errc::InvalidTech,
          "alpha_prime_at_one: requires a power-law technology");
  return alpha0_ * n_;
}

double LearningTech::max_alpha() const {
  if (kind_ == Kind::SpatialRule)
    return *std::max_element(table_.begin(), table_.end());
  return alpha0_;
}

void LearningTech::alpha_at_nodes(std::span<const double> s, std::span<double> out) const {
  require(s.size() == out.size(), Errc::DimensionMismatch, "alpha_at_nodes: size mismatch");
  if (kind_ == Kind::SpatialRule) {
    require(table_.size() == out.size(), Errc::DimensionMismatch,
            "alpha_at_nodes: table size mismatch");
    std::copy(table_.begin(), table_.end(), out.begin());
    return;
  }
  if (kind_ == Kind::ConstantRate) {
    std::fill(out.begin(), out.end(), alpha0_);
    return;
  }
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = alpha_of(s[i]);
}

}  // namespace kinexus
