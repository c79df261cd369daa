#include "kinexus/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>

#include <json.hpp>

namespace kinexus::cli {

const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Transient: return "transient";
    case ExperimentKind::DiracDemo: return "dirac";
    case ExperimentKind::BgpConstant: return "bgp_constant";
    case ExperimentKind::BgpGeneral: return "bgp_general";
    case ExperimentKind::Perturbation: return "perturbation";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& name) {
  if (name == "transient") return ExperimentKind::Transient;
  if (name == "dirac") return ExperimentKind::DiracDemo;
  if (name == "bgp_constant") return ExperimentKind::BgpConstant;
  if (name == "bgp_general") return ExperimentKind::BgpGeneral;
  if (name == "perturbation") return ExperimentKind::Perturbation;
  fail(Errc::ConfigError, "unknown experiment '" + name + "'");
}

RunConfig preset(ExperimentKind kind) {
  RunConfig c;  // Transient defaults
  c.experiment = kind;
  switch (kind) {
    case ExperimentKind::Transient:
      break;
    case ExperimentKind::DiracDemo:
      c.spacing = Spacing::Linear;
      c.z_min = 0.0;
      c.z_max = 1.0;
      c.n_nodes = 1001;
      c.t_final = 25.0;
      c.n_steps = 10000;
      break;
    case ExperimentKind::BgpConstant:
    case ExperimentKind::BgpGeneral:
      c.spacing = Spacing::Logarithmic;
      c.z_min = 1e-5;
      c.z_max = 1000.0;
      c.n_nodes = 20001;
      c.tol = 1e-8;
      c.max_iter = 50;
      break;
    case ExperimentKind::Perturbation:
      c.t_final = 250.0;
      c.n_steps = 500;
      break;
  }
  return c;
}

namespace {

using Setter = std::function<void(RunConfig&, const nlohmann::json&)>;

double as_number(const nlohmann::json& v, const std::string& key) {
  require(v.is_number(), Errc::ConfigError, "key '" + key + "' must be a number");
  return v.get<double>();
}

int as_int(const nlohmann::json& v, const std::string& key) {
  require(v.is_number_integer(), Errc::ConfigError, "key '" + key + "' must be an integer");
  return v.get<int>();
}

bool as_bool(const nlohmann::json& v, const std::string& key) {
  require(v.is_boolean(), Errc::ConfigError, "key '" + key + "' must be a boolean");
  return v.get<bool>();
}

std::string as_string(const nlohmann::json& v, const std::string& key) {
  require(v.is_string(), Errc::ConfigError, "key '" + key + "' must be a string");
  return v.get<std::string>();
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"experiment",
       [](RunConfig& c, const nlohmann::json& v) {
         c.experiment = experiment_from_string(as_string(v, "experiment"));
       }},
      {"spacing",
       [](RunConfig& c, const nlohmann::json& v) {
         const std::string s = as_string(v, "spacing");
         if (s == "linear") c.spacing = Spacing::Linear;
         else if (s == "log" || s == "logarithmic") c.spacing = Spacing::Logarithmic;
         else fail(Errc::ConfigError, "spacing must be 'linear' or 'log', got '" + s + "'");
       }},
      {"z_min", [](RunConfig& c, const nlohmann::json& v) { c.z_min = as_number(v, "z_min"); }},
      {"z_max", [](RunConfig& c, const nlohmann::json& v) { c.z_max = as_number(v, "z_max"); }},
      {"n_nodes", [](RunConfig& c, const nlohmann::json& v) { c.n_nodes = as_int(v, "n_nodes"); }},
      {"t_final", [](RunConfig& c, const nlohmann::json& v) { c.t_final = as_number(v, "t_final"); }},
      {"n_steps", [](RunConfig& c, const nlohmann::json& v) { c.n_steps = as_int(v, "n_steps"); }},
      {"alpha0", [](RunConfig& c, const nlohmann::json& v) { c.alpha0 = as_number(v, "alpha0"); }},
      {"n", [](RunConfig& c, const nlohmann::json& v) { c.n = as_number(v, "n"); }},
      {"beta", [](RunConfig& c, const nlohmann::json& v) { c.beta = as_number(v, "beta"); }},
      {"r", [](RunConfig& c, const nlohmann::json& v) { c.r = as_number(v, "r"); }},
      {"theta", [](RunConfig& c, const nlohmann::json& v) { c.theta = as_number(v, "theta"); }},
      {"k", [](RunConfig& c, const nlohmann::json& v) { c.k = as_number(v, "k"); }},
      {"tol", [](RunConfig& c, const nlohmann::json& v) { c.tol = as_number(v, "tol"); }},
      {"max_iter", [](RunConfig& c, const nlohmann::json& v) { c.max_iter = as_int(v, "max_iter"); }},
      {"relaxation",
       [](RunConfig& c, const nlohmann::json& v) { c.relaxation = as_number(v, "relaxation"); }},
      {"perturb_amplitude",
       [](RunConfig& c, const nlohmann::json& v) { c.perturb_amplitude = as_number(v, "perturb_amplitude"); }},
      {"perturb_freq",
       [](RunConfig& c, const nlohmann::json& v) { c.perturb_freq = as_number(v, "perturb_freq"); }},
      {"perturb_window_lo",
       [](RunConfig& c, const nlohmann::json& v) { c.perturb_window_lo = as_number(v, "perturb_window_lo"); }},
      {"perturb_window_hi",
       [](RunConfig& c, const nlohmann::json& v) { c.perturb_window_hi = as_number(v, "perturb_window_hi"); }},
      {"sigma_x0", [](RunConfig& c, const nlohmann::json& v) { c.sigma_x0 = as_number(v, "sigma_x0"); }},
      {"sigma_low", [](RunConfig& c, const nlohmann::json& v) { c.sigma_low = as_number(v, "sigma_low"); }},
      {"k_anchor", [](RunConfig& c, const nlohmann::json& v) { c.k_anchor = as_number(v, "k_anchor"); }},
      {"output_dir",
       [](RunConfig& c, const nlohmann::json& v) { c.output_dir = as_string(v, "output_dir"); }},
      {"max_snapshots",
       [](RunConfig& c, const nlohmann::json& v) { c.max_snapshots = as_int(v, "max_snapshots"); }},
      {"gnuplot", [](RunConfig& c, const nlohmann::json& v) { c.gnuplot = as_bool(v, "gnuplot"); }},
  };
  return table;
}

void apply_json(RunConfig& config, const nlohmann::json& doc) {
  require(doc.is_object(), Errc::ConfigError, "config root must be a JSON object");
  const auto& table = setters();
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    const auto setter = table.find(it.key());
    require(setter != table.end(), Errc::ConfigError, "unknown config key '" + it.key() + "'");
    setter->second(config, it.value());
  }
}

nlohmann::json parse_override_value(const std::string& key, const std::string& text) {
  // Strings that look like numbers/bools become them; everything else stays
  // a string (matches the JSON file types key by key).
  if (key == "experiment" || key == "spacing" || key == "output_dir")
    return nlohmann::json(text);
  if (key == "gnuplot") {
    if (text == "true" || text == "1") return nlohmann::json(true);
    if (text == "false" || text == "0") return nlohmann::json(false);
    fail(Errc::ConfigError, "key 'gnuplot' must be true or false");
  }
  if (key == "n_nodes" || key == "n_steps" || key == "max_iter" || key == "max_snapshots") {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(text, &pos);
      require(pos == text.size(), Errc::ConfigError, "trailing characters after integer");
      return nlohmann::json(v);
    } catch (const Error&) {
      throw;
    } catch (...) {
      fail(Errc::ConfigError, "key '" + key + "' needs an integer, got '" + text + "'");
    }
  }
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    require(pos == text.size(), Errc::ConfigError, "trailing characters after number");
    return nlohmann::json(v);
  } catch (const Error&) {
    throw;
  } catch (...) {
    fail(Errc::ConfigError, "key '" + key + "' needs a number, got '" + text + "'");
  }
}

}  // namespace

RunConfig parse_config(ExperimentKind kind, const std::string& config_file,
                       const std::vector<std::string>& overrides) {
  RunConfig config = preset(kind);

  if (!config_file.empty()) {
    std::ifstream in(config_file);
    require(in.good(), Errc::ConfigError, "cannot open config file '" + config_file + "'");
    nlohmann::json doc;
    try {
      in >> doc;
    } catch (const nlohmann::json::exception& e) {
      fail(Errc::ConfigError, "config file '" + config_file + "': " + e.what());
    }
    apply_json(config, doc);
  }

  for (const std::string& item : overrides) {
    const auto eq = item.find('=');
    require(eq != std::string::npos && eq > 0, Errc::ConfigError,
            "override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    nlohmann::json doc;
    doc[key] = parse_override_value(key, value);
    apply_json(config, doc);
  }

  // The subcommand decides the experiment; a config file must not silently
  // flip it.
  config.experiment = kind;
  validate(config);
  return config;
}

void validate(const RunConfig& c) {
  auto check = [](bool ok, const std::string& msg) {
    require(ok, Errc::ConfigError, msg);
  };
  check(c.n_nodes >= 3, "n_nodes must be at least 3");
  check(std::isfinite(c.z_min) && std::isfinite(c.z_max) && c.z_min < c.z_max,
        "need z_min < z_max");
  if (c.spacing == Spacing::Logarithmic) check(c.z_min > 0.0, "log spacing needs z_min > 0");
  else check(c.z_min >= 0.0, "z_min must be non-negative");
  check(c.t_final > 0.0, "t_final must be positive");
  check(c.n_steps >= 1, "n_steps must be at least 1");
  check(c.alpha0 >= 0.0 && std::isfinite(c.alpha0), "alpha0 must be non-negative");
  check(c.n >= 0.0 && c.n < 1.0, "n must lie in [0,1)");
  check(c.beta >= 0.0 && c.beta <= 1.0, "beta must lie in [0,1]");
  check(c.r >= 0.0 && std::isfinite(c.r), "r must be non-negative");
  check(c.theta > 0.0, "theta must be positive");
  check(c.k > 0.0, "k must be positive");
  check(c.tol > 0.0, "tol must be positive");
  check(c.max_iter >= 1, "max_iter must be at least 1");
  check(c.relaxation > 0.0 && c.relaxation <= 1.0, "relaxation must lie in (0,1]");
  check(c.max_snapshots >= 2, "max_snapshots must be at least 2");
  check(c.k_anchor > 0.0, "k_anchor must be positive");

  const bool kinetic_run = c.experiment == ExperimentKind::Transient ||
                           c.experiment == ExperimentKind::DiracDemo ||
                           c.experiment == ExperimentKind::Perturbation;
  if (kinetic_run) {
    // alpha = 1 - z for the concentration demo, alpha0 otherwise.
    const double max_alpha = (c.experiment == ExperimentKind::DiracDemo) ? 1.0 : c.alpha0;
    const double max_beta = (c.experiment == ExperimentKind::DiracDemo) ? 1.0 : c.beta;
    const double dt = c.t_final / c.n_steps;
    check(dt * (1.0 + max_beta) * max_alpha < 1.0,
          "dt violates the density positivity bound dt (1+beta) max_alpha < 1");
    check(dt * (c.r + max_alpha) < 1.0,
          "dt violates the backward stability bound dt (r + max_alpha) < 1");
  }
  if (c.experiment == ExperimentKind::Perturbation) {
    check(c.perturb_window_lo < c.perturb_window_hi, "perturbation window is empty");
    check(std::isfinite(c.perturb_amplitude), "perturbation amplitude must be finite");
    check(c.perturb_freq > 0.0, "perturbation frequency must be positive");
  }
  if (c.experiment == ExperimentKind::BgpGeneral) {
    check(c.sigma_low >= 0.0 && c.sigma_low <= 1.0, "sigma_low must lie in [0,1]");
    check(c.sigma_x0 > c.z_min && c.sigma_x0 < c.z_max, "sigma_x0 must lie inside the mesh");
    check(c.alpha0 > 0.0, "bgp_general needs alpha0 > 0");
    check(c.n > 0.0, "bgp_general needs a strategy-dependent technology (n > 0)");
  }
  if (c.experiment == ExperimentKind::BgpConstant)
    check(c.alpha0 > 0.0, "bgp_constant needs alpha0 > 0");
}

}  // namespace kinexus::cli
