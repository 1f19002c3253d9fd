// Command-line front end: solve policies offline, run experiments and sweeps.
//
//   crqos_cli preset-list
//   crqos_cli solve --preset fig8 --policy out/fig8.pol
//   crqos_cli sweep --preset fig8 --policy out/fig8.pol --out out/fig8
//   crqos_cli run   --config configs/default.yaml --seeds 10 --out out/default
//
// Exit codes: 0 ok, 1 configuration error, 2 missing or incompatible policy
// artifact, 3 numerical failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "crqos/config.hpp"
#include "crqos/experiment.hpp"

namespace {

enum ExitCode { kOk = 0, kConfig = 1, kArtifact = 2, kNumerical = 3 };

struct Common {
  std::string config;
  std::string preset;
  std::optional<int> seeds;
  std::string out;
  std::string policy;
  unsigned threads = crqos::default_thread_count();
};

void add_source_flags(CLI::App* cmd, Common& c) {
  auto* cfg = cmd->add_option("--config", c.config, "experiment configuration (YAML)");
  auto* pre = cmd->add_option("--preset", c.preset, "built-in preset (see preset-list)");
  cfg->excludes(pre);
  cmd->add_option("--seeds", c.seeds, "number of seeds (overrides the config)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
  cmd->add_option("--policy", c.policy, "policy artifact path (default <out>/policy.bin)");
  cmd->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
}

crqos::ExperimentConfig resolve(const Common& c) {
  crqos::ExperimentConfig cfg;
  if (!c.config.empty()) cfg = crqos::load_config(c.config);
  else if (!c.preset.empty()) cfg = crqos::preset(c.preset);
  else throw crqos::ConfigError(crqos::ConfigError::Kind::Validation, "config", "give --config or --preset");
  if (c.seeds) cfg.seeds = *c.seeds;
  if (!c.out.empty()) cfg.output_dir = c.out;
  crqos::validate_all(cfg);
  return cfg;
}

std::filesystem::path policy_path(const Common& c, const crqos::ExperimentConfig& cfg) {
  return c.policy.empty() ? std::filesystem::path(cfg.output_dir) / "policy.bin" : std::filesystem::path(c.policy);
}

int do_run(const Common& c, bool sweep) {
  const auto cfg = resolve(c);
  if (sweep && !cfg.sweep)
    throw crqos::ConfigError(crqos::ConfigError::Kind::Validation, "sweep", "sweep: config has no sweep section");
  std::optional<std::vector<crqos::StoredPolicy>> store;
  if (cfg.needs_policy()) store = crqos::read_policies(policy_path(c, cfg));
  crqos::RunOptions opt;
  opt.threads = c.threads;
  opt.use_sweep = sweep;
  const auto res = crqos::run_experiment(cfg, store ? &*store : nullptr, opt);
  crqos::write_outputs(cfg, res, cfg.output_dir);
  std::printf("%zu episodes -> %s\n", res.rows.size(), cfg.output_dir.c_str());
  return kOk;
}

int do_solve(const Common& c) {
  const auto cfg = resolve(c);
  const auto path = policy_path(c, cfg);
  const auto policies = crqos::solve_and_store(cfg, path, c.threads);
  std::printf("%zu policies (horizon %d, resolution %d) -> %s\n", policies.size(), cfg.horizon, cfg.grid_resolution,
              path.string().c_str());
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cross-layer video-over-cognitive-radio experiments"};
  app.require_subcommand(1);
  Common common;
  auto* solve = app.add_subcommand("solve", "solve and store the sensing policy for every sweep point");
  auto* run = app.add_subcommand("run", "run the base configuration (sweep ignored)");
  auto* sweep = app.add_subcommand("sweep", "run every sweep point");
  auto* list = app.add_subcommand("preset-list", "list built-in presets");
  for (auto* cmd : {solve, run, sweep}) add_source_flags(cmd, common);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  try {
    if (*list) {
      for (const auto& n : crqos::preset_names()) std::printf("%-6s %s\n", n.c_str(), crqos::preset_description(n).c_str());
      return kOk;
    }
    if (*solve) return do_solve(common);
    if (*run) return do_run(common, false);
    if (*sweep) return do_run(common, true);
  } catch (const crqos::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfig;
  } catch (const crqos::ArtifactError& e) {
    std::fprintf(stderr, "artifact error: %s\n", e.what());
    return kArtifact;
  } catch (const crqos::NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  } catch (const crqos::DomainError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return kNumerical;
  }
  return kOk;
}
