#pragma once

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxagg/harness.hpp"

namespace proxagg {

// Exit codes: 0 success, 1 configuration error, 2 runtime error.
inline int cli_main(int argc, const char* const* argv) {
  CLI::App app{
      "Benchmark harness for stochastic strongly convex optimization: the "
      "prox-aggregation solver, baselines, and theoretical bound tables"};

  std::string config_path;
  std::string out_override;
  std::string mode_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::int64_t> trials_override;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "experiment config (JSON)");
    cmd->add_option("--seed", seed_override, "override master_seed");
    cmd->add_option("--trials", trials_override, "override trial count");
    cmd->add_option("--out", out_override, "override output path");
  };
  add_common(&app);
  app.add_option("--mode", mode_override,
                 "trial|mc|sweep|bounds (alternative to a subcommand)");

  CLI::App* trial_cmd = app.add_subcommand(
      "trial", "run one trial of the first solver and print its suboptimality");
  CLI::App* mc_cmd = app.add_subcommand(
      "mc", "Monte Carlo cells for every solver at the first budget");
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "full solver x budget Monte Carlo sweep");
  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "emit the theoretical rate table");
  add_common(trial_cmd);
  add_common(mc_cmd);
  add_common(sweep_cmd);
  add_common(bounds_cmd);

  std::optional<double> opt_G, opt_lambda, opt_sigma2, opt_Gtilde, opt_D;
  std::vector<std::int64_t> bounds_n;
  bounds_cmd->add_option("--G", opt_G, "max stochastic subgradient norm");
  bounds_cmd->add_option("--lambda", opt_lambda, "strong convexity modulus");
  bounds_cmd->add_option("--sigma2", opt_sigma2, "max subgradient variance");
  bounds_cmd->add_option("--Gtilde", opt_Gtilde, "max noise-gradient norm");
  bounds_cmd->add_option("--D", opt_D, "domain diameter");
  bounds_cmd->add_option("--n", bounds_n, "oracle budgets")->delimiter(',');
  app.require_subcommand(0, 1);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    std::string mode = mode_override;
    if (trial_cmd->parsed()) mode = "trial";
    else if (mc_cmd->parsed()) mode = "mc";
    else if (sweep_cmd->parsed()) mode = "sweep";
    else if (bounds_cmd->parsed()) mode = "bounds";

    std::optional<ExperimentConfig> cfg;
    if (!config_path.empty()) {
      cfg = load_config(config_path);
      if (seed_override) cfg->master_seed = *seed_override;
      if (trials_override) cfg->trials = *trials_override;
      if (!out_override.empty()) cfg->out = out_override;
      if (mode.empty()) mode = cfg->mode;
    }
    if (mode.empty())
      throw ConfigError("no mode: pass a subcommand or a config with a mode");

    if (mode == "bounds") {
      BoundParams p;
      if (cfg) p = cfg->problem->bound_params();
      if (opt_G) p.G = *opt_G;
      if (opt_lambda) p.lambda = *opt_lambda;
      if (opt_sigma2) p.sigma2 = *opt_sigma2;
      if (opt_Gtilde) p.Gtilde = *opt_Gtilde;
      if (opt_D) p.D = *opt_D;
      if (!cfg && (!opt_G || !opt_lambda))
        throw ConfigError("bounds needs --G and --lambda (or a config)");
      std::vector<std::int64_t> grid =
          !bounds_n.empty() ? bounds_n
                            : (cfg ? cfg->n_grid : std::vector<std::int64_t>{});
      if (grid.empty())
        throw ConfigError("bounds needs --n budgets (or a config n_grid)");
      const std::string out =
          !out_override.empty() ? out_override : (cfg ? cfg->out : "");
      if (out.empty()) {
        emit_bound_table(p, grid, std::cout);
      } else {
        emit_bound_table(p, grid, out);
      }
      return 0;
    }

    if (!cfg) throw ConfigError(mode + " needs --config");

    if (mode == "trial") {
      const double s = run_trial(*cfg, cfg->solvers.front(),
                                 cfg->n_grid.front(), 0);
      std::cout << detail::fmt17(s) << "\n";
      return 0;
    }
    if (mode == "mc" || mode == "sweep") {
      const std::vector<std::int64_t> budgets =
          mode == "mc" ? std::vector<std::int64_t>{cfg->n_grid.front()}
                       : cfg->n_grid;
      const std::vector<SummaryRow> rows = run_sweep(*cfg, budgets);
      if (cfg->out.empty()) {
        emit_csv(rows, std::cout);
      } else {
        emit_csv(rows, cfg->out);
      }
      return 0;
    }
    throw ConfigError("unknown mode '" + mode + "'");
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace proxagg
