// Command-line driver: scenario execution and the scripted experiment suites.
// Exit codes: 0 = all checks pass, 2 = checks failed, 1 = execution error.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "landau/harness.hpp"

namespace {

using landau::ExperimentConfig;

// Scenario-specific defaults used when no --config file is given.
ExperimentConfig default_config(const std::string& scenario) {
  ExperimentConfig cfg;
  cfg.scenario = scenario;
  if (scenario == "poincare") {
    cfg.n = 64;
    cfg.half_width = 5.0;
    cfg.initial.kind = "spike_with_bath";
    cfg.initial.spike_mass = 0.6;
    cfg.initial.sigma = 0.25;
  } else if (scenario == "degiorgi") {
    cfg.n = 24;
    cfg.half_width = 8.0;
    cfg.gamma = -1.0;
    cfg.initial.kind = "bimodal";
    cfg.initial.separation = 2.0;
    cfg.initial.sigma = 0.8;
    cfg.solver.t_end = 1.0;
    cfg.solver.snapshot_interval = 0.01;
  } else if (scenario == "rates") {
    cfg.n = 32;
    cfg.half_width = 8.0;
    cfg.initial.kind = "spike_with_bath";
    cfg.initial.spike_mass = 0.6;
    cfg.initial.sigma = 0.3;
    cfg.solver.t_end = 2.0;
    cfg.solver.snapshot_interval = 0.05;
  } else if (scenario == "moments") {
    cfg.n = 24;
    cfg.half_width = 8.0;
    cfg.gamma = -2.0;
    cfg.initial.kind = "bimodal";
    cfg.initial.separation = 2.0;
    cfg.initial.sigma = 0.8;
    cfg.solver.t_end = 1.0;
    cfg.solver.snapshot_interval = 0.05;
  }
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"deterministic velocity-space simulator and estimate harness"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false;
  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* copt = sub->add_option("--config", config_path, "JSON experiment config");
    if (config_required) copt->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seed", seed, "seed override")->each([&](const std::string&) {
      have_seed = true;
    });
  };

  auto* cmd_run = app.add_subcommand("run", "execute a config (scenario read from the file)");
  add_common(cmd_run, true);

  auto* cmd_poi = app.add_subcommand("poincare", "epsilon-Poincare constant sweep");
  add_common(cmd_poi, false);
  std::vector<double> poi_gammas;
  int eps_decades = 0;
  std::uint64_t family_seed = 0;
  bool have_family_seed = false;
  cmd_poi->add_option("--gamma", poi_gammas, "potential exponent(s) to sweep");
  cmd_poi->add_option("--eps-decades", eps_decades, "decades below eps_max to scan");
  cmd_poi->add_option("--family-seed", family_seed, "seed for the random test-function block")
      ->each([&](const std::string&) { have_family_seed = true; });

  auto* cmd_deg = app.add_subcommand("degiorgi", "level-set iteration on a simulated trajectory");
  add_common(cmd_deg, false);
  double dg_gamma = 0.0, dg_s = 0.0, dg_p = 0.0, dg_alpha = 0.0, dg_tstar = 0.0, dg_T = 0.0;
  std::string dg_mode;
  cmd_deg->add_option("--gamma", dg_gamma, "potential exponent");
  cmd_deg->add_option("--s", dg_s, "moment order s");
  cmd_deg->add_option("--p-gamma", dg_p, "interpolation exponent (gamma > -2 branch)");
  cmd_deg->add_option("--alpha", dg_alpha, "interpolation exponent (gamma = -2 branch)");
  cmd_deg->add_option("--t-star", dg_tstar, "iteration start time");
  cmd_deg->add_option("--T", dg_T, "window end time");
  cmd_deg->add_option("--mode", dg_mode, "property | ledger")
      ->check(CLI::IsMember({"property", "ledger"}));

  auto* cmd_rates = app.add_subcommand("rates", "L^p-norm appearance rate fit");
  add_common(cmd_rates, false);
  auto* cmd_moments = app.add_subcommand("moments", "moment growth fit");
  add_common(cmd_moments, false);
  auto* cmd_lorentz = app.add_subcommand("lorentz-selftest", "Lorentz-space identity checks");
  add_common(cmd_lorentz, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    std::vector<ExperimentConfig> cfgs;
    const std::string forced = app.get_subcommands().front()->get_name();
    if (forced == "run") {
      cfgs = landau::load_config_list(config_path);
    } else {
      ExperimentConfig cfg =
          config_path.empty() ? default_config(forced) : landau::load_config(config_path);
      cfg.scenario = forced;
      if (forced == "poincare") {
        if (!poi_gammas.empty()) cfg.poincare.gammas = poi_gammas;
        if (eps_decades > 0) cfg.poincare.eps_decades = eps_decades;
        if (have_family_seed) cfg.poincare.family_seed = family_seed;
      } else if (forced == "degiorgi") {
        if (dg_gamma != 0.0) cfg.gamma = dg_gamma;
        if (dg_s > 0.0) cfg.degiorgi.cfg.s = dg_s;
        if (dg_p > 0.0) cfg.degiorgi.cfg.p_gamma = dg_p;
        if (dg_alpha > 0.0) cfg.degiorgi.cfg.alpha = dg_alpha;
        if (dg_tstar > 0.0) cfg.degiorgi.cfg.t_star = dg_tstar;
        if (dg_T > 0.0) cfg.degiorgi.cfg.T = dg_T;
        if (!dg_mode.empty()) cfg.degiorgi.mode = dg_mode;
        cfg.solver.gamma = cfg.gamma;
      }
      cfgs.push_back(std::move(cfg));
    }
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      if (have_seed) {
        cfgs[i].seed = seed;
        cfgs[i].lorentz.seed = seed;
      }
      if (!out_dir.empty())
        cfgs[i].out_dir = cfgs.size() == 1
                              ? out_dir
                              : out_dir + "/" + std::to_string(i) + "_" + cfgs[i].scenario;
    }
    return landau::run_scenarios(cfgs);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
