#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "kinexus/error.hpp"
#include "kinexus/experiments.hpp"
#include "kinexus/log.hpp"

namespace {

struct CommonArgs {
  std::string config_file;
  std::string out_dir;
  std::vector<std::string> sets;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_file, "JSON config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--set", args.sets, "override a config key (key=value), repeatable");
  cmd->add_flag("--gnuplot", args.gnuplot, "also emit gnuplot scripts for the CSVs");
}

int dispatch(kinexus::cli::ExperimentKind kind, const CommonArgs& args) {
  kinexus::cli::RunConfig config =
      kinexus::cli::parse_config(kind, args.config_file, args.sets);
  if (!args.out_dir.empty()) config.output_dir = args.out_dir;
  if (args.gnuplot) config.gnuplot = true;
  return kinexus::cli::run_experiment(config);
}

int exit_code_for(const kinexus::Error& e) {
  switch (e.code()) {
    case kinexus::Errc::ConfigError:
      return 2;
    case kinexus::Errc::NotConverged:
      return 3;
    default:
      return 4;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kinexus: kinetic knowledge-exchange transport with optimal "
               "learning control, balanced-growth-path construction, and the "
               "standard experiment presets"};
  app.require_subcommand(1);

  CommonArgs sim_args, dirac_args, bgp_args, perturb_args;
  std::string bgp_mode = "constant";
  std::string check_dir;

  CLI::App* simulate =
      app.add_subcommand("simulate", "coupled transient run (forward/backward fixed point)");
  add_common(simulate, sim_args);

  CLI::App* dirac = app.add_subcommand(
      "dirac", "concentration demo with alpha = 1 - z, compared for beta = 0 and 1");
  add_common(dirac, dirac_args);

  CLI::App* bgp = app.add_subcommand("bgp", "balanced-growth-path profile");
  add_common(bgp, bgp_args);
  bgp->add_option("--mode", bgp_mode, "constant | general")
      ->check(CLI::IsMember({"constant", "general"}));

  CLI::App* perturb =
      app.add_subcommand("perturb", "paired perturbed/unperturbed transient runs");
  add_common(perturb, perturb_args);

  CLI::App* check = app.add_subcommand("check", "re-validate a finished run's outputs");
  check->add_option("dir", check_dir, "run output directory")->required();

  CLI11_PARSE(app, argc, argv);

  using kinexus::cli::ExperimentKind;
  try {
    if (simulate->parsed()) return dispatch(ExperimentKind::Transient, sim_args);
    if (dirac->parsed()) return dispatch(ExperimentKind::DiracDemo, dirac_args);
    if (bgp->parsed())
      return dispatch(bgp_mode == "general" ? ExperimentKind::BgpGeneral
                                            : ExperimentKind::BgpConstant,
                      bgp_args);
    if (perturb->parsed()) return dispatch(ExperimentKind::Perturbation, perturb_args);
    if (check->parsed()) return kinexus::cli::check_run(check_dir);
  } catch (const kinexus::Error& e) {
    kinexus::log_error(e.what());
    return exit_code_for(e);
  } catch (const std::exception& e) {
    kinexus::log_error(e.what());
    return 4;
  }
  return 2;
}
