#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "mobcache/mobility.hpp"

namespace mobcache::bench {

/// Config problem with the offending field path baked into the message
/// (`config: <field>: <reason>`).
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& reason)
      : std::runtime_error("config: " + field + ": " + reason), field_path(field) {}
  std::string field_path;
};

enum class ScenarioKind { bs, ut };

enum class Strategy { coded, uncoded_exact, uncoded_local, greedy, random_zipf, mpc };

const char* to_string(Strategy s);
Strategy strategy_from_string(const std::string& name, const std::string& field);

/// One experiment: scenario kind, model shape, popularity grid, strategy
/// list, data source (trace / fitted model files / synthetic generator),
/// seed and replay trial count. Parsed from `key = value` lines with dotted
/// section keys; lists are comma-separated; `#` starts a comment.
struct ExperimentConfig {
  ScenarioKind kind = ScenarioKind::bs;
  std::uint64_t seed = 1;
  std::size_t trials = 0;
  std::size_t jobs = 1;

  std::size_t num_files = 0;
  std::vector<double> gamma_grid;       // sweep.gamma
  double request_gamma = -1.0;          // request.gamma (single-shot commands)
  std::vector<Strategy> strategies;

  // base stations
  std::size_t num_bs = 0;
  std::vector<double> bs_capacities;    // bs.capacity scalar or bs.capacities list
  double rate = 0.0;                    // file sizes per second
  std::string bs_trace;
  std::string bs_transition;
  std::string bs_cell_stats;
  std::string paths_source = "windows"; // windows | markov
  double horizon_s = 0.0;
  std::size_t num_paths = 0;

  // waypoint generator (used when no trace or model files are given)
  bool have_waypoint = false;
  WaypointParams waypoint;

  // user terminals
  std::size_t num_users = 0;
  std::vector<double> ut_capacities;
  double delay_threshold_s = 0.0;
  std::string ut_trace;
  std::string ut_rates;
  double window_s = 0.0;                // 0 = trace span
  bool have_contact_gen = false;
  double contact_rate_min = 0.0;
  double contact_rate_max = 0.0;
  std::vector<double> gamma_c_grid = {0.0, 0.5, 1.0, 1.5, 2.0, 3.0, 4.0};
  std::size_t gamma_c_trials = 8;

  // solver knobs
  std::size_t coded_iterations = 5000;
  std::size_t uncoded_restarts = 3;

  // evaluate input
  std::string placement_path;

  bool emit_svg = true;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);

}  // namespace mobcache::bench
