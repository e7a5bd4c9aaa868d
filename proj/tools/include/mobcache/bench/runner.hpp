#pragma once

#include <string>

#include "mobcache/bench/config.hpp"
#include "mobcache/bench/report.hpp"

namespace mobcache::bench {

/// Full grid-by-strategy run: one row per (grid point, strategy, metric).
/// Deterministic for a fixed config; grid points may run in parallel
/// (config.jobs) without changing the output.
ResultTable run_experiment(const ExperimentConfig& cfg);

/// Subcommand bodies. Each returns the paths it wrote.
std::vector<std::string> run_estimate(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_optimize(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_evaluate(const ExperimentConfig& cfg, const std::string& out_dir);
std::vector<std::string> run_sweep(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace mobcache::bench
