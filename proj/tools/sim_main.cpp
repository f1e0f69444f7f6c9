// SPDX-License-Identifier: Apache-2.0

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fpcsim/campaign.hpp"
#include "fpcsim/config.hpp"
#include "fpcsim/errors.hpp"

namespace {

struct CommonOpts {
  std::string config_path;
  std::string preset;
  int drops = -1;
  int threads = -1;
  std::string seed;
  std::string out_dir;
};

void add_common(CLI::App* cmd, CommonOpts* opts, bool allow_preset) {
  CLI::Option* config =
      cmd->add_option("--config", opts->config_path, "config file path");
  if (allow_preset) {
    CLI::Option* preset =
        cmd->add_option("--preset", opts->preset, "named preset to run");
    config->excludes(preset);
    preset->excludes(config);
  } else {
    config->required();
  }
  cmd->add_option("--drops", opts->drops, "Monte Carlo drops per grid point");
  cmd->add_option("--threads", opts->threads, "worker threads (0 = auto)");
  cmd->add_option("--seed", opts->seed, "master seed (unsigned 64-bit)");
  cmd->add_option("--out", opts->out_dir, "output directory");
}

fpcsim::KeyValueConfig base_config(const CommonOpts& opts) {
  if (!opts.preset.empty()) return fpcsim::preset_config(opts.preset);
  if (opts.config_path.empty()) {
    throw fpcsim::ConfigError("either --config or --preset is required");
  }
  return fpcsim::KeyValueConfig::load(opts.config_path);
}

void apply_overrides(fpcsim::KeyValueConfig& cfg, const CommonOpts& opts) {
  if (opts.drops >= 0) cfg.set("run.drops", std::to_string(opts.drops));
  if (opts.threads >= 0) cfg.set("run.threads", std::to_string(opts.threads));
  if (!opts.seed.empty()) cfg.set("run.seed", opts.seed);
  if (!opts.out_dir.empty()) cfg.set("run.out_dir", opts.out_dir);
}

int run_config(const fpcsim::KeyValueConfig& cfg) {
  const fpcsim::SimConfig sim = fpcsim::SimConfig::resolve(cfg);
  fpcsim::run_campaign(sim);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TDD massive MIMO downlink simulator with uplink fractional "
               "power control"};
  app.require_subcommand(1);

  CommonOpts run_opts;
  CLI::App* run = app.add_subcommand("run", "run one campaign");
  add_common(run, &run_opts, true);

  CommonOpts sweep_opts;
  std::string sweep_p0;
  std::string sweep_alpha;
  bool include_nopc = false;
  CLI::App* sweep =
      app.add_subcommand("sweep", "sweep a (P0, alpha) grid over one config");
  add_common(sweep, &sweep_opts, false);
  sweep->add_option("--p0", sweep_p0, "comma list of P0 values in dBm")
      ->required();
  sweep->add_option("--alpha", sweep_alpha, "comma list of alpha values")
      ->required();
  sweep->add_flag("--include-nopc", include_nopc,
                  "append a noPC row to the grid");

  CLI::App* presets =
      app.add_subcommand("presets", "list the built-in presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (presets->parsed()) {
      for (const std::string& name : fpcsim::preset_names()) {
        std::cout << name << "  " << fpcsim::preset_description(name) << '\n';
      }
      return 0;
    }
    if (run->parsed()) {
      fpcsim::KeyValueConfig cfg = base_config(run_opts);
      apply_overrides(cfg, run_opts);
      return run_config(cfg);
    }
    fpcsim::KeyValueConfig cfg = base_config(sweep_opts);
    cfg.set("sweep.p0_dbm", sweep_p0);
    cfg.set("sweep.alpha", sweep_alpha);
    if (include_nopc) cfg.set("sweep.include_nopc", "true");
    apply_overrides(cfg, sweep_opts);
    return run_config(cfg);
  } catch (const fpcsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
