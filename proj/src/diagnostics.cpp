#include "kinexus/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace kinexus::diag {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
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
  fit.slope = (sxx > 0.0) ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  fit.r2 = (syy > 0.0 && sxx > 0.0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace

TailFit fit_pareto_tail(std::span<const double> F, const Mesh& mesh,
                        std::pair<double, double> window, double mass) {
  require(F.size() == mesh.size(), Errc::DimensionMismatch,
          "fit_pareto_tail: F/mesh size mismatch");
  require(window.first < window.second, Errc::EmptyWindow, "fit_pareto_tail: empty window");

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double z = mesh.nodes[i];
    if (z < window.first || z > window.second) continue;
    const double tail = mass - F[i];
    require(tail > 1e-300, Errc::DegenerateTail,
            "fit_pareto_tail: mass - F vanishes at z = " + std::to_string(z));
    lx.push_back(std::log(z));
    ly.push_back(std::log(tail));
  }
  require(lx.size() >= 3, Errc::EmptyWindow,
          "fit_pareto_tail: fewer than 3 nodes in the window");

  const LineFit fit = least_squares(lx, ly);
  require(fit.slope < 0.0, Errc::DegenerateTail, "fit_pareto_tail: tail does not decay");

  TailFit out;
  out.theta_hat = -1.0 / fit.slope;
  out.k_hat = std::exp(fit.intercept);
  out.r_squared = fit.r2;
  out.window = window;
  return out;
}

std::pair<double, double> transient_tail_window(std::span<const double> F,
                                                const Mesh& mesh, double mass) {
  require(F.size() == mesh.size(), Errc::DimensionMismatch,
          "transient_tail_window: size mismatch");
  double lo = mesh.z_min, hi = mesh.z_max;
  bool seen_lo = false, seen_hi = false;
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double frac = (mass - F[i]) / mass;
    if (!seen_lo && frac <= 0.05) {
      lo = mesh.nodes[i];
      seen_lo = true;
    }
    if (!seen_hi && frac <= 0.003) {
      hi = mesh.nodes[i];
      seen_hi = true;
    }
  }
  require(seen_lo && seen_hi && lo < hi, Errc::EmptyWindow,
          "transient_tail_window: tail fractions not bracketed on this mesh");
  return {lo, hi};
}

std::vector<double> rescale_density(const DensityField& f, double gamma, double t,
                                    const Mesh& target, int* out_of_range) {
  require(gamma >= 0.0 && t >= 0.0, Errc::InvalidParam,
          "rescale_density: need gamma >= 0 and t >= 0");
  const double factor = std::exp(gamma * t);
  const Mesh& source = *f.mesh;
  std::vector<double> out(target.size());
  int misses = 0;
  for (std::size_t j = 0; j < target.size(); ++j) {
    const double z = target.nodes[j] * factor;
    if (z < source.z_min || z > source.z_max) {
      out[j] = 0.0;
      ++misses;
      continue;
    }
    out[j] = factor * source.interpolate(f.values, z);
  }
  if (out_of_range != nullptr) *out_of_range = misses;
  return out;
}

GrowthFit fit_growth_rate(std::span<const double> Y, std::span<const double> t,
                          std::pair<double, double> window) {
  require(Y.size() == t.size(), Errc::DimensionMismatch, "fit_growth_rate: size mismatch");
  require(window.first < window.second, Errc::EmptyWindow, "fit_growth_rate: empty window");
  std::vector<double> ts, logy;
  for (std::size_t i = 0; i < Y.size(); ++i) {
    if (t[i] < window.first || t[i] > window.second) continue;
    require(Y[i] > 0.0, Errc::NonPositiveY,
            "fit_growth_rate: Y(t = " + std::to_string(t[i]) + ") is not positive");
    ts.push_back(t[i]);
    logy.push_back(std::log(Y[i]));
  }
  require(ts.size() >= 3, Errc::EmptyWindow, "fit_growth_rate: fewer than 3 samples");
  const LineFit fit = least_squares(ts, logy);
  GrowthFit out;
  out.gamma_hat = fit.slope;
  out.window = window;
  out.linearity_r2 = fit.r2;
  return out;
}

DiracMetrics dirac_metrics(const std::vector<DensityField>& density_path,
                           const TimeAxis& time, double M, int eps_cells) {
  require(!density_path.empty(), Errc::InvalidParam, "dirac_metrics: empty path");
  require(eps_cells >= 1, Errc::InvalidParam, "dirac_metrics: eps_cells must be >= 1");
  const Mesh& mesh = *density_path.front().mesh;
  require(M >= mesh.z_min && M <= mesh.z_max, Errc::InvalidParam,
          "dirac_metrics: M outside the mesh");

  const std::size_t iM = mesh.nearest(M);
  const std::size_t i0 = (static_cast<int>(iM) >= eps_cells)
                             ? iM - static_cast<std::size_t>(eps_cells)
                             : 0;
  const double z0 = mesh.nodes[i0];
  const double mass = density_path.front().mass;

  DiracMetrics out;
  out.z_threshold = z0;
  for (std::size_t k = 0; k < density_path.size(); ++k) {
    const double tm = kinetic::tail_mass(density_path[k], z0);
    if (!out.concentration_time.has_value() && tm >= 0.9 * mass)
      out.concentration_time = time.time(static_cast<int>(k));
    if (k + 1 == density_path.size()) out.final_tail_mass = tm;
  }
  return out;
}

}  // namespace kinexus::diag
