#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "mobcache/bench/config.hpp"
#include "mobcache/bench/runner.hpp"
#include "mobcache/bench/selftest.hpp"

namespace {

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::int64_t seed_override = -1;
  std::int64_t jobs_override = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts, bool config_required = true) {
  auto* config = cmd->add_option("--config", opts.config_path, "experiment config file");
  if (config_required) config->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--seed", opts.seed_override, "override the config seed");
  cmd->add_option("--jobs", opts.jobs_override, "parallel grid points");
}

int run(const CommonOptions& opts,
        std::vector<std::string> (*body)(const mobcache::bench::ExperimentConfig&,
                                         const std::string&)) {
  auto cfg = mobcache::bench::load_config(opts.config_path);
  if (opts.seed_override >= 0) cfg.seed = static_cast<std::uint64_t>(opts.seed_override);
  if (opts.jobs_override > 0) cfg.jobs = static_cast<std::size_t>(opts.jobs_override);
  for (const auto& path : body(cfg, opts.out_dir)) std::cout << "wrote " << path << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mobility-aware cache placement experiments"};
  app.require_subcommand(1);

  CommonOptions estimate_opts, optimize_opts, evaluate_opts, sweep_opts;
  auto* estimate = app.add_subcommand("estimate", "fit mobility models from a trace");
  add_common(estimate, estimate_opts);
  auto* optimize = app.add_subcommand("optimize", "compute one placement and write it");
  add_common(optimize, optimize_opts);
  auto* evaluate = app.add_subcommand("evaluate", "score a placement file");
  add_common(evaluate, evaluate_opts);
  auto* sweep = app.add_subcommand("sweep", "run the full grid and write CSV/SVG");
  add_common(sweep, sweep_opts);
  app.add_subcommand("selftest", "run the built-in oracle suites");

  CLI11_PARSE(app, argc, argv);

  try {
    if (estimate->parsed()) return run(estimate_opts, mobcache::bench::run_estimate);
    if (optimize->parsed()) return run(optimize_opts, mobcache::bench::run_optimize);
    if (evaluate->parsed()) return run(evaluate_opts, mobcache::bench::run_evaluate);
    if (sweep->parsed()) return run(sweep_opts, mobcache::bench::run_sweep);
    const int failures = mobcache::bench::run_selftest(std::cout);
    if (failures > 0) {
      std::cerr << "error: selftest: " << failures << " suite(s) failed\n";
      return 1;
    }
    return 0;
  } catch (const mobcache::bench::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
