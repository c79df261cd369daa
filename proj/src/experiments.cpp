#include "kinexus/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

#include "kinexus/bgp.hpp"
#include "kinexus/diagnostics.hpp"
#include "kinexus/io.hpp"
#include "kinexus/log.hpp"
#include "kinexus/mfg.hpp"

namespace kinexus::cli {

namespace {

using nlohmann::ordered_json;

ordered_json config_echo(const RunConfig& c) {
  ordered_json j;
  j["experiment"] = to_string(c.experiment);
  j["spacing"] = (c.spacing == Spacing::Linear) ? "linear" : "log";
  j["z_min"] = c.z_min;
  j["z_max"] = c.z_max;
  j["n_nodes"] = c.n_nodes;
  j["t_final"] = c.t_final;
  j["n_steps"] = c.n_steps;
  j["alpha0"] = c.alpha0;
  j["n"] = c.n;
  j["beta"] = c.beta;
  j["r"] = c.r;
  j["theta"] = c.theta;
  j["k"] = c.k;
  j["tol"] = c.tol;
  j["max_iter"] = c.max_iter;
  j["relaxation"] = c.relaxation;
  j["perturb_amplitude"] = c.perturb_amplitude;
  j["perturb_freq"] = c.perturb_freq;
  j["perturb_window_lo"] = c.perturb_window_lo;
  j["perturb_window_hi"] = c.perturb_window_hi;
  j["sigma_x0"] = c.sigma_x0;
  j["sigma_low"] = c.sigma_low;
  j["k_anchor"] = c.k_anchor;
  j["output_dir"] = c.output_dir;
  j["max_snapshots"] = c.max_snapshots;
  j["gnuplot"] = c.gnuplot;
  return j;
}

/// Conservation and ordering measurements over a density path.
ordered_json density_invariants(const std::vector<DensityField>& path,
                                const TimeAxis& time) {
  const DensityField& f0 = path.front();
  const Mesh& mesh = *f0.mesh;

  double worst_drift = 0.0;
  double min_density = 0.0;
  for (const DensityField& f : path) {
    worst_drift = std::max(worst_drift, std::abs(f.mass - f0.mass) / f0.mass);
    min_density = std::min(min_density,
                           *std::min_element(f.values.begin(), f.values.end()));
  }

  // Fixed probe levels: z_min plus the initial quartiles.
  std::vector<double> probes{mesh.z_min};
  const std::vector<double> F0 = kinetic::cdf(f0);
  for (double q : {0.25, 0.5, 0.75}) {
    const double target = q * f0.mass;
    for (std::size_t i = 0; i < F0.size(); ++i)
      if (F0[i] >= target) {
        probes.push_back(mesh.nodes[i]);
        break;
      }
  }

  double worst_moment_drop = 0.0;
  double worst_tail_drop = 0.0;
  double prev_moment = kinetic::first_moment(f0);
  std::vector<double> prev_tails;
  for (double z0 : probes) prev_tails.push_back(kinetic::tail_mass(f0, z0));
  for (std::size_t k = 1; k < path.size(); ++k) {
    const double m1 = kinetic::first_moment(path[k]);
    worst_moment_drop = std::max(worst_moment_drop, prev_moment - m1);
    prev_moment = m1;
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const double tm = kinetic::tail_mass(path[k], probes[p]);
      worst_tail_drop = std::max(worst_tail_drop, prev_tails[p] - tm);
      prev_tails[p] = tm;
    }
  }

  ordered_json j;
  j["mass_initial"] = f0.mass;
  j["mass_drift_rel"] = worst_drift;
  j["mass_conserved"] = worst_drift <= 1e-8;
  j["min_density"] = min_density;
  j["positive"] = min_density >= 0.0;
  j["first_moment_worst_drop"] = worst_moment_drop;
  j["first_moment_monotone"] = worst_moment_drop <= 1e-12;
  j["tail_mass_probes"] = probes;
  j["tail_mass_worst_drop"] = worst_tail_drop;
  j["tail_mass_monotone"] = worst_tail_drop <= 1e-12 * f0.mass;
  j["horizon"] = time.t_final;
  return j;
}

/// Shape measurements over the stored value/strategy paths, with the gain
/// field recomputed per stored step.
ordered_json value_shape_invariants(const mfg::MfgSolution& sol) {
  const Mesh& mesh = *sol.density_path.front().mesh;
  const std::size_t n = mesh.size();
  double v_min = 0.0, worst_v_step = 0.0, worst_b_step = 0.0, worst_s_step = 0.0;
  double b_min = 0.0, s_at_top = 0.0;
  for (std::size_t k = 0; k < sol.value_path.size(); ++k) {
    const std::vector<double>& V = sol.value_path[k].values;
    const std::vector<double>& S = sol.strategy_path[k].values;
    const GainField B = hjb::compute_gain(sol.value_path[k], sol.density_path[k]);
    s_at_top = std::max(s_at_top, S[n - 1]);
    for (std::size_t i = 0; i < n; ++i) {
      const double scale = 1.0 + mesh.nodes[i];
      v_min = std::min(v_min, V[i] / scale);
      b_min = std::min(b_min, B.values[i]);
      if (i > 0) {
        worst_v_step = std::max(worst_v_step, (V[i - 1] - V[i]) / scale);
        worst_b_step = std::max(worst_b_step, B.values[i] - B.values[i - 1]);
        worst_s_step = std::max(worst_s_step, S[i] - S[i - 1]);
      }
    }
  }
  ordered_json j;
  j["value_min_weighted"] = v_min;
  j["value_nonnegative"] = v_min >= -hjb::kShapeTol;
  j["value_worst_decrease_weighted"] = worst_v_step;
  j["value_monotone"] = worst_v_step <= hjb::kShapeTol;
  j["gain_min"] = b_min;
  j["gain_nonnegative"] = b_min >= -1e-12;
  j["gain_worst_increase"] = worst_b_step;
  j["gain_nonincreasing"] = worst_b_step <= 1e-10;
  j["strategy_worst_increase"] = worst_s_step;
  j["strategy_nonincreasing"] = worst_s_step <= 1e-12;
  j["strategy_at_zmax"] = s_at_top;
  return j;
}

void write_density_csv(const std::string& path, const std::vector<DensityField>& fields,
                       const TimeAxis& time, const std::vector<std::size_t>& steps) {
  const Mesh& mesh = *fields.front().mesh;
  io::CsvFile csv("t,z,f");
  for (std::size_t k : steps) {
    const double t = time.time(static_cast<int>(k));
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double cells[3] = {t, mesh.nodes[i], fields[k].values[i]};
      csv.row(cells);
    }
  }
  csv.save(path);
}

void write_values_csv(const std::string& path, const mfg::MfgSolution& sol,
                      const TimeAxis& time, const std::vector<std::size_t>& steps) {
  const Mesh& mesh = *sol.density_path.front().mesh;
  io::CsvFile csv("t,z,V,s");
  for (std::size_t k : steps) {
    const double t = time.time(static_cast<int>(k));
    for (std::size_t i = 0; i < mesh.size(); ++i) {
      const double cells[4] = {t, mesh.nodes[i], sol.value_path[k].values[i],
                               sol.strategy_path[k].values[i]};
      csv.row(cells);
    }
  }
  csv.save(path);
}

void write_production_csv(const std::string& path, std::span<const double> Y,
                          const TimeAxis& time) {
  io::CsvFile csv("t,Y");
  for (std::size_t k = 0; k < Y.size(); ++k) {
    const double cells[2] = {time.time(static_cast<int>(k)), Y[k]};
    csv.row(cells);
  }
  csv.save(path);
}

void write_bgp_csv(const std::string& path, const bgp::BgpProfile& prof) {
  const Mesh& mesh = *prof.mesh;
  io::CsvFile csv("x,Phi,phi,v,sigma");
  for (std::size_t i = 0; i < mesh.size(); ++i) {
    const double cells[5] = {mesh.nodes[i], prof.Phi[i], prof.phi[i], prof.v[i],
                             prof.sigma[i]};
    csv.row(cells);
  }
  csv.save(path);
}

ordered_json residual_history(const mfg::MfgSolution& sol) {
  ordered_json out = ordered_json::array();
  for (const mfg::IterationResidual& r : sol.residuals)
    out.push_back(ordered_json{{"delta_F", r.delta_F}, {"delta_V", r.delta_V}});
  return out;
}

ordered_json tail_fit_json(double t, const diag::TailFit& fit) {
  ordered_json j;
  j["t"] = t;
  j["theta_hat"] = fit.theta_hat;
  j["k_hat"] = fit.k_hat;
  j["r_squared"] = fit.r_squared;
  j["window_lo"] = fit.window.first;
  j["window_hi"] = fit.window.second;
  return j;
}

std::vector<double> time_samples(const TimeAxis& time) {
  std::vector<double> t(static_cast<std::size_t>(time.n_steps) + 1);
  for (std::size_t k = 0; k < t.size(); ++k) t[k] = time.time(static_cast<int>(k));
  return t;
}

LearningTech tech_from(const RunConfig& c) {
  return (c.n == 0.0) ? LearningTech::constant_rate(c.alpha0)
                      : LearningTech::power_law(c.alpha0, c.n);
}

void maybe_gnuplot(const RunConfig& c, const std::string& script) {
  if (!c.gnuplot) return;
  io::write_text(c.output_dir + "/plots.gp", script);
}

// ---------------------------------------------------------------------------

int run_transient(const RunConfig& c) {
  const MeshPtr mesh = make_mesh(c.spacing, c.z_min, c.z_max, static_cast<std::size_t>(c.n_nodes));
  const TimeAxis time{c.t_final, c.n_steps};
  const DensityField f0 = kinetic::frechet_initial_density(mesh, c.k, c.theta);

  mfg::MfgParams params;
  params.tech = tech_from(c);
  params.r = c.r;
  params.beta = c.beta;
  params.time = time;
  params.tol = c.tol;
  params.max_iter = c.max_iter;
  params.relaxation = c.relaxation;

  log_info("transient: solving the coupled system");
  const mfg::MfgSolution sol = mfg::solve_mfg(f0, params);

  const auto steps = io::snapshot_indices(sol.density_path.size(),
                                          static_cast<std::size_t>(c.max_snapshots));
  write_density_csv(c.output_dir + "/density.csv", sol.density_path, time, steps);
  write_values_csv(c.output_dir + "/values.csv", sol, time, steps);
  write_production_csv(c.output_dir + "/production.csv", sol.production_series, time);

  ordered_json summary;
  summary["config"] = config_echo(c);
  summary["converged"] = sol.converged;
  summary["iterations"] = sol.iterations;
  summary["residuals"] = residual_history(sol);
  summary["invariants"] = density_invariants(sol.density_path, time);
  summary["value_shape"] = value_shape_invariants(sol);

  // Tail fits per stored snapshot.
  ordered_json tails = ordered_json::array();
  double worst_theta_dev = 0.0;
  for (std::size_t k : steps) {
    const std::vector<double> F = kinetic::cdf(sol.density_path[k]);
    const auto window = diag::transient_tail_window(F, *mesh, sol.density_path[k].mass);
    const diag::TailFit fit = diag::fit_pareto_tail(F, *mesh, window, sol.density_path[k].mass);
    tails.push_back(tail_fit_json(time.time(static_cast<int>(k)), fit));
    worst_theta_dev = std::max(worst_theta_dev, std::abs(fit.theta_hat - c.theta) / c.theta);
  }
  summary["fits"]["tails"] = tails;
  summary["fits"]["theta_worst_rel_dev"] = worst_theta_dev;

  // Growth rate on the middle half of the horizon.
  const std::vector<double> t = time_samples(time);
  const std::pair<double, double> window{0.25 * c.t_final, 0.75 * c.t_final};
  const diag::GrowthFit growth = diag::fit_growth_rate(sol.production_series, t, window);
  summary["fits"]["growth"] = ordered_json{{"gamma_hat", growth.gamma_hat},
                                           {"window_lo", growth.window.first},
                                           {"window_hi", growth.window.second},
                                           {"linearity_r2", growth.linearity_r2}};

  // Growth identity gamma = theta_hat * int alpha(S) f dz evaluated on the
  // stored snapshots inside the fit window (e^{gamma t} factors cancel, so z
  // variables can be used directly).
  {
    double acc = 0.0;
    int count = 0;
    std::size_t fit_idx = 0;
    for (std::size_t k : steps) {
      const double tk = time.time(static_cast<int>(k));
      const double theta_hat = tails[fit_idx++]["theta_hat"].get<double>();
      if (tk < window.first || tk > window.second) continue;
      std::vector<double> alpha_s(mesh->size());
      params.tech.alpha_at_nodes(sol.strategy_path[k].values, alpha_s);
      double integral = 0.0;
      for (std::size_t i = 0; i < mesh->size(); ++i)
        integral += mesh->weights[i] * alpha_s[i] * sol.density_path[k].values[i];
      acc += theta_hat * integral;
      ++count;
    }
    const double gamma_formula = (count > 0) ? acc / count : 0.0;
    summary["fits"]["gamma_formula"] = gamma_formula;
    summary["fits"]["gamma_hat_vs_formula_rel"] =
        (gamma_formula > 0.0) ? std::abs(growth.gamma_hat - gamma_formula) / gamma_formula
                              : 0.0;
  }

  io::write_json(c.output_dir + "/summary.json", summary);
  maybe_gnuplot(c,
                "set datafile separator ','\n"
                "set key left\n"
                "set logscale y\n"
                "plot 'production.csv' using 1:2 skip 1 with lines title 'Y(t)'\n"
                "pause -1\n");
  return sol.converged ? 0 : 3;
}

int run_dirac(const RunConfig& c) {
  const MeshPtr mesh = make_mesh(c.spacing, c.z_min, c.z_max, static_cast<std::size_t>(c.n_nodes));
  const TimeAxis time{c.t_final, c.n_steps};

  // Uniform block up to 0.5 with the jump node at its midpoint value, which
  // keeps the trapezoid mass exactly 1 on an even cell count.
  const double M = 0.5;
  std::vector<double> f0_values(mesh->size(), 0.0);
  const double half_cell = 0.25 * (mesh->nodes[1] - mesh->nodes[0]);
  for (std::size_t i = 0; i < mesh->size(); ++i) {
    const double z = mesh->nodes[i];
    if (std::abs(z - M) <= half_cell) f0_values[i] = 1.0;
    else if (z < M) f0_values[i] = 2.0;
  }
  const DensityField f0 = make_density(mesh, std::move(f0_values));

  std::vector<double> alpha_rule(mesh->size());
  for (std::size_t i = 0; i < mesh->size(); ++i)
    alpha_rule[i] = 1.0 - mesh->nodes[i];

  log_info("dirac: running the beta = 0 and beta = 1 comparisons");
  auto run = [&](double beta) {
    return kinetic::simulate_density(f0, alpha_rule, beta, time);
  };
  auto future1 = std::async(std::launch::async, run, 1.0);
  const std::vector<DensityField> path0 = run(0.0);
  const std::vector<DensityField> path1 = future1.get();

  const auto steps = io::snapshot_indices(path0.size(), static_cast<std::size_t>(c.max_snapshots));
  write_density_csv(c.output_dir + "/density_beta0.csv", path0, time, steps);
  write_density_csv(c.output_dir + "/density_beta1.csv", path1, time, steps);

  const diag::DiracMetrics m0 = diag::dirac_metrics(path0, time, M, 2);
  const diag::DiracMetrics m1 = diag::dirac_metrics(path1, time, M, 2);

  auto metrics_json = [](const diag::DiracMetrics& m) {
    ordered_json j;
    if (m.concentration_time.has_value()) j["concentration_time"] = *m.concentration_time;
    else j["concentration_time"] = nullptr;
    j["final_tail_mass"] = m.final_tail_mass;
    j["z_threshold"] = m.z_threshold;
    return j;
  };

  ordered_json summary;
  summary["config"] = config_echo(c);
  summary["beta0"] = metrics_json(m0);
  summary["beta1"] = metrics_json(m1);
  summary["beta0"]["invariants"] = density_invariants(path0, time);
  summary["beta1"]["invariants"] = density_invariants(path1, time);
  const bool faster = m1.concentration_time.has_value() && m0.concentration_time.has_value()
                          ? *m1.concentration_time < *m0.concentration_time
                          : m1.concentration_time.has_value();
  summary["comparison"]["symmetric_concentrates_faster"] = faster;
  io::write_json(c.output_dir + "/summary.json", summary);
  maybe_gnuplot(c,
                "set datafile separator ','\n"
                "plot 'density_beta0.csv' using 2:3 skip 1 with lines title 'f (beta=0)',\\\n"
                "     'density_beta1.csv' using 2:3 skip 1 with lines title 'f (beta=1)'\n"
                "pause -1\n");
  return 0;
}

int run_bgp(const RunConfig& c) {
  const MeshPtr mesh = make_mesh(c.spacing, c.z_min, c.z_max, static_cast<std::size_t>(c.n_nodes));
  ordered_json summary;
  summary["config"] = config_echo(c);

  bgp::BgpProfile prof;
  if (c.experiment == ExperimentKind::BgpConstant) {
    log_info("bgp: constant learning rate profile");
    prof = bgp::bgp_constant_alpha(c.alpha0, c.theta, c.k, c.r, mesh);
  } else {
    log_info("bgp: given-sigma profile (step rule)");
    std::vector<double> sigma(mesh->size());
    for (std::size_t i = 0; i < mesh->size(); ++i)
      sigma[i] = (mesh->nodes[i] <= c.sigma_x0) ? 1.0 : c.sigma_low;
    const LearningTech tech = tech_from(c);
    prof = bgp::bgp_general(sigma, tech, c.theta, mesh, c.tol, c.r, c.k_anchor, c.max_iter);
    summary["gamma_bracket_lo"] = c.theta * tech.alpha_of(c.sigma_low);
    summary["gamma_bracket_hi"] = c.theta * tech.alpha_of(1.0);
  }

  write_bgp_csv(c.output_dir + "/bgp.csv", prof);
  summary["gamma"] = prof.gamma;
  summary["theta"] = prof.theta;
  summary["k_tail"] = prof.k_tail;
  summary["r"] = prof.r;
  summary["iterations"] = prof.iterations;
  summary["converged"] = prof.converged;
  summary["phi_residual"] = prof.phi_residual;
  summary["v_residual"] = prof.v_residual;
  summary["w_boundary"] = prof.w_boundary;
  {
    std::vector<double> dummy_sigma(prof.sigma);
    const LearningTech gamma_tech =
        (c.experiment == ExperimentKind::BgpConstant) ? LearningTech::constant_rate(c.alpha0)
                                                      : tech_from(c);
    summary["gamma_identity"] =
        bgp::gamma_from_profile(prof.phi, dummy_sigma, gamma_tech, prof.theta, *mesh);
  }
  io::write_json(c.output_dir + "/summary.json", summary);
  maybe_gnuplot(c,
                "set datafile separator ','\n"
                "set logscale x\n"
                "plot 'bgp.csv' using 1:2 skip 1 with lines title 'Phi(x)'\n"
                "pause -1\n");
  return prof.converged ? 0 : 3;
}

int run_perturbation(const RunConfig& c) {
  const MeshPtr mesh = make_mesh(c.spacing, c.z_min, c.z_max, static_cast<std::size_t>(c.n_nodes));
  const TimeAxis time{c.t_final, c.n_steps};
  const DensityField f0 = kinetic::frechet_initial_density(mesh, c.k, c.theta);
  const mfg::PerturbedDensity perturbed = mfg::perturb_density(
      f0, c.perturb_amplitude, c.perturb_freq, {c.perturb_window_lo, c.perturb_window_hi});

  mfg::MfgParams params;
  params.tech = tech_from(c);
  params.r = c.r;
  params.beta = c.beta;
  params.time = time;
  params.tol = c.tol;
  params.max_iter = c.max_iter;
  params.relaxation = c.relaxation;

  log_info("perturbation: solving the paired transients");
  auto solve = [&](const DensityField& f) { return mfg::solve_mfg(f, params); };
  auto future_p = std::async(std::launch::async, solve, std::cref(perturbed.field));
  const mfg::MfgSolution base = solve(f0);
  const mfg::MfgSolution pert = future_p.get();

  const auto steps = io::snapshot_indices(base.density_path.size(),
                                          static_cast<std::size_t>(c.max_snapshots));
  write_density_csv(c.output_dir + "/density.csv", base.density_path, time, steps);
  write_density_csv(c.output_dir + "/density_perturbed.csv", pert.density_path, time, steps);
  write_production_csv(c.output_dir + "/production.csv", base.production_series, time);
  write_production_csv(c.output_dir + "/production_perturbed.csv", pert.production_series,
                       time);

  // Relative sup distance of Y(t), excluding the final 10% of the horizon
  // (terminal-condition boundary layer; reported separately).
  double dev_main = 0.0, dev_terminal = 0.0;
  for (std::size_t k = 0; k < base.production_series.size(); ++k) {
    const double t = time.time(static_cast<int>(k));
    const double rel = std::abs(pert.production_series[k] - base.production_series[k]) /
                       base.production_series[k];
    if (t <= 0.9 * c.t_final) dev_main = std::max(dev_main, rel);
    else dev_terminal = std::max(dev_terminal, rel);
  }

  ordered_json summary;
  summary["config"] = config_echo(c);
  summary["converged"] = base.converged && pert.converged;
  summary["iterations"] = ordered_json{{"base", base.iterations}, {"perturbed", pert.iterations}};
  summary["residuals"] = residual_history(base);
  summary["residuals_perturbed"] = residual_history(pert);
  summary["raw_mass_delta"] = perturbed.raw_mass_delta;
  summary["deviation_rel_sup"] = dev_main;
  summary["deviation_terminal_layer"] = dev_terminal;
  summary["invariants"] = density_invariants(base.density_path, time);
  summary["invariants_perturbed"] = density_invariants(pert.density_path, time);
  io::write_json(c.output_dir + "/summary.json", summary);
  maybe_gnuplot(c,
                "set datafile separator ','\n"
                "set logscale y\n"
                "plot 'production.csv' using 1:2 skip 1 with lines title 'Y(t)',\\\n"
                "     'production_perturbed.csv' using 1:2 skip 1 with lines title 'Y(t) perturbed'\n"
                "pause -1\n");
  return (base.converged && pert.converged) ? 0 : 3;
}

}  // namespace

int run_experiment(const RunConfig& config) {
  io::ensure_directory(config.output_dir);
  switch (config.experiment) {
    case ExperimentKind::Transient: return run_transient(config);
    case ExperimentKind::DiracDemo: return run_dirac(config);
    case ExperimentKind::BgpConstant:
    case ExperimentKind::BgpGeneral: return run_bgp(config);
    case ExperimentKind::Perturbation: return run_perturbation(config);
  }
  fail(Errc::ConfigError, "unhandled experiment kind");
}

// ---------------------------------------------------------------------------
// check: re-validate a finished run from its files.

namespace {

struct Check {
  std::string name;
  bool pass;
  std::string detail;
};

std::vector<std::vector<double>> read_csv(const std::string& path, std::size_t columns,
                                          bool* present) {
  std::ifstream in(path);
  std::vector<std::vector<double>> rows;
  if (!in.good()) {
    *present = false;
    return rows;
  }
  *present = true;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    require(row.size() == columns, Errc::IoError,
            path + ": expected " + std::to_string(columns) + " columns");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

int check_run(const std::string& run_dir) {
  std::vector<Check> checks;

  std::ifstream in(run_dir + "/summary.json");
  require(in.good(), Errc::IoError, "no summary.json under '" + run_dir + "'");
  nlohmann::json summary;
  in >> summary;
  require(summary.contains("config"), Errc::IoError, "summary.json has no config echo");
  const auto& cfg = summary["config"];
  const Spacing spacing = (cfg["spacing"] == "linear") ? Spacing::Linear : Spacing::Logarithmic;
  const MeshPtr mesh = make_mesh(spacing, cfg["z_min"].get<double>(),
                                 cfg["z_max"].get<double>(), cfg["n_nodes"].get<std::size_t>());
  const std::size_t n = mesh->size();

  auto check_density_file = [&](const std::string& name) {
    bool present = false;
    const auto rows = read_csv(run_dir + "/" + name, 3, &present);
    if (!present) return;
    require(rows.size() % n == 0, Errc::IoError, name + ": row count is not a whole number of snapshots");
    const std::size_t snaps = rows.size() / n;
    double mass0 = 0.0, worst_drift = 0.0, min_f = 0.0, prev_m1 = 0.0, worst_drop = 0.0;
    for (std::size_t s = 0; s < snaps; ++s) {
      std::vector<double> f(n);
      for (std::size_t i = 0; i < n; ++i) f[i] = rows[s * n + i][2];
      const double mass = integrate(f, *mesh);
      double m1 = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        m1 += mesh->weights[i] * mesh->nodes[i] * f[i];
      min_f = std::min(min_f, *std::min_element(f.begin(), f.end()));
      if (s == 0) mass0 = mass;
      else {
        worst_drift = std::max(worst_drift, std::abs(mass - mass0) / mass0);
        worst_drop = std::max(worst_drop, prev_m1 - m1);
      }
      prev_m1 = m1;
    }
    checks.push_back({name + ": density non-negative", min_f >= 0.0,
                      "min f = " + io::format_double(min_f)});
    checks.push_back({name + ": mass drift <= 1e-8", worst_drift <= 1e-8,
                      "drift = " + io::format_double(worst_drift)});
    checks.push_back({name + ": first moment non-decreasing", worst_drop <= 1e-10,
                      "worst drop = " + io::format_double(worst_drop)});
  };
  check_density_file("density.csv");
  check_density_file("density_beta0.csv");
  check_density_file("density_beta1.csv");
  check_density_file("density_perturbed.csv");

  {
    bool present = false;
    const auto rows = read_csv(run_dir + "/values.csv", 4, &present);
    if (present) {
      require(rows.size() % n == 0, Errc::IoError, "values.csv: bad row count");
      const std::size_t snaps = rows.size() / n;
      double v_min = 0.0, worst_v = 0.0, worst_s = 0.0, s_top = 0.0, s_range = 0.0;
      for (std::size_t s = 0; s < snaps; ++s) {
        for (std::size_t i = 0; i < n; ++i) {
          const double V = rows[s * n + i][2], S = rows[s * n + i][3];
          const double scale = 1.0 + mesh->nodes[i];
          v_min = std::min(v_min, V / scale);
          s_range = std::max(s_range, std::max(-S, S - 1.0));
          if (i > 0) {
            worst_v = std::max(worst_v, (rows[s * n + i - 1][2] - V) / scale);
            worst_s = std::max(worst_s, S - rows[s * n + i - 1][3]);
          }
          if (i == n - 1) s_top = std::max(s_top, S);
        }
      }
      checks.push_back({"values.csv: V non-negative", v_min >= -hjb::kShapeTol,
                        "min V/(1+z) = " + io::format_double(v_min)});
      checks.push_back({"values.csv: V non-decreasing", worst_v <= hjb::kShapeTol,
                        "worst decrease = " + io::format_double(worst_v)});
      checks.push_back({"values.csv: s in [0,1]", s_range <= 0.0,
                        "excess = " + io::format_double(s_range)});
      checks.push_back({"values.csv: s non-increasing", worst_s <= 1e-12,
                        "worst increase = " + io::format_double(worst_s)});
      checks.push_back({"values.csv: s(z_max) = 0", s_top == 0.0,
                        "s(z_max) = " + io::format_double(s_top)});
    }
  }

  for (const std::string name : {"production.csv", "production_perturbed.csv"}) {
    bool present = false;
    const auto rows = read_csv(run_dir + "/" + name, 2, &present);
    if (!present) continue;
    double y_min = rows.empty() ? 0.0 : rows.front()[1];
    for (const auto& row : rows) y_min = std::min(y_min, row[1]);
    checks.push_back({name + ": Y positive", y_min > 0.0, "min Y = " + io::format_double(y_min)});
  }

  {
    bool present = false;
    const auto rows = read_csv(run_dir + "/bgp.csv", 5, &present);
    if (present) {
      double worst = 0.0, sig_range = 0.0;
      for (std::size_t i = 1; i < rows.size(); ++i)
        worst = std::max(worst, rows[i - 1][1] - rows[i][1]);
      for (const auto& row : rows)
        sig_range = std::max(sig_range, std::max(-row[4], row[4] - 1.0));
      checks.push_back({"bgp.csv: Phi non-decreasing", worst <= 1e-14,
                        "worst decrease = " + io::format_double(worst)});
      checks.push_back({"bgp.csv: sigma in [0,1]", sig_range <= 1e-12,
                        "excess = " + io::format_double(sig_range)});
    }
  }

  bool all_pass = true;
  for (const Check& chk : checks) {
    std::fprintf(stdout, "[check] %s: %s (%s)\n", chk.name.c_str(),
                 chk.pass ? "PASS" : "FAIL", chk.detail.c_str());
    all_pass = all_pass && chk.pass;
  }
  require(!checks.empty(), Errc::IoError, "no run outputs found under '" + run_dir + "'");
  return all_pass ? 0 : 4;
}

}  // namespace kinexus::cli
