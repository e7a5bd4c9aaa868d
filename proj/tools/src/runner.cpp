#include "mobcache/bench/runner.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <stdexcept>
#include <thread>
#include <variant>

#include "mobcache/bench/model_io.hpp"
#include "mobcache/bs_place.hpp"
#include "mobcache/evalsim.hpp"
#include "mobcache/rng.hpp"
#include "mobcache/ut_place.hpp"

namespace mobcache::bench {

namespace {

// Stream ids for deriving per-task seeds from the config seed.
enum : std::uint64_t { kTraceStream = 1, kPathStream = 2, kContactStream = 3, kReplayStream = 4 };

AssociationTrace bs_trace_from_config(const ExperimentConfig& cfg) {
  if (!cfg.bs_trace.empty()) return read_association_trace_file(cfg.bs_trace);
  return random_waypoint_trace(cfg.waypoint, mix_seed(cfg.seed, kTraceStream));
}

/// Path scenarios per config precedence: fitted model files, then a trace,
/// then the waypoint generator. `markov` fits a chain to the trace and
/// samples it; `windows` chops the trace directly.
PathScenarioSet bs_scenarios_from_config(const ExperimentConfig& cfg) {
  PathScenarioSet set;
  if (!cfg.bs_transition.empty()) {
    const auto model = read_transition_model(cfg.bs_transition, cfg.bs_cell_stats);
    set = sample_paths(model, cfg.horizon_s, cfg.num_paths, mix_seed(cfg.seed, kPathStream));
  } else {
    const auto trace = bs_trace_from_config(cfg);
    if (cfg.paths_source == "markov") {
      const auto model = estimate_transition_model(trace);
      set = sample_paths(model, cfg.horizon_s, cfg.num_paths, mix_seed(cfg.seed, kPathStream));
    } else {
      set = paths_from_trace(trace, cfg.horizon_s);
    }
  }
  // pad scenario vectors up to the configured station count
  for (auto& s : set.scenarios) {
    if (s.per_cell_sojourn_s.size() > cfg.num_bs)
      throw std::runtime_error("trace uses more cells than bs.num_bs");
    s.per_cell_sojourn_s.resize(cfg.num_bs, 0.0);
  }
  return set;
}

ContactModel ut_contacts_from_config(const ExperimentConfig& cfg) {
  if (!cfg.ut_rates.empty()) {
    auto model = read_contact_model(cfg.ut_rates, cfg.num_users);
    if (model.num_users != cfg.num_users)
      throw std::runtime_error("rate matrix uses more users than ut.num_users");
    return model;
  }
  if (!cfg.ut_trace.empty()) {
    const auto trace = read_contact_trace_file(cfg.ut_trace);
    double window = cfg.window_s;
    if (window <= 0.0) {
      const auto [lo, hi] = trace.span();
      window = hi - lo;
    }
    auto model = estimate_contact_model(trace, window, cfg.num_users);
    return model;
  }
  return random_contact_model(cfg.num_users, cfg.contact_rate_min, cfg.contact_rate_max,
                              mix_seed(cfg.seed, kContactStream));
}

BsInstance make_bs_instance(const ExperimentConfig& cfg, const PathScenarioSet& scenarios,
                            double gamma) {
  BsInstance inst;
  inst.scenarios = scenarios;
  inst.popularity = zipf_pmf(cfg.num_files, gamma);
  inst.rate = cfg.rate;
  inst.caps.per_node = cfg.bs_capacities;
  inst.num_bs = cfg.num_bs;
  return inst;
}

UtInstance make_ut_instance(const ExperimentConfig& cfg, const ContactModel& contacts,
                            double gamma) {
  UtInstance inst;
  inst.contacts = contacts;
  inst.popularity = zipf_pmf(cfg.num_files, gamma);
  inst.delay_threshold_s = cfg.delay_threshold_s;
  inst.caps.per_node = cfg.ut_capacities;
  return inst;
}

AnyPlacement compute_placement(const ExperimentConfig& cfg, Strategy strategy,
                               const BsInstance& inst, std::uint64_t seed) {
  switch (strategy) {
    case Strategy::coded:
      return optimize_coded(inst, cfg.coded_iterations, seed);
    case Strategy::uncoded_exact:
      return optimize_uncoded(inst, UncodedMode::exact, seed);
    case Strategy::uncoded_local:
      return optimize_uncoded(inst, UncodedMode::local_search, seed, cfg.uncoded_restarts);
    case Strategy::mpc:
      return mpc_placement(inst.popularity, inst.caps, inst.num_bs);
    default:
      throw std::logic_error("strategy not valid for base stations");
  }
}

struct UtStrategyResult {
  DiscretePlacement placement;
  double analytic = 0.0;
};

UtStrategyResult compute_ut_strategy(const ExperimentConfig& cfg, Strategy strategy,
                                     const UtInstance& inst, std::uint64_t seed) {
  UtStrategyResult result;
  switch (strategy) {
    case Strategy::greedy:
      result.placement = greedy_placement(inst);
      result.analytic = offloading_ratio(result.placement, inst);
      return result;
    case Strategy::random_zipf: {
      // line-searched skew; the analytic value is the mean ratio over the
      // random placements at the selected skew
      const auto line = line_search_gamma(inst, cfg.gamma_c_grid, cfg.gamma_c_trials, seed);
      result.placement = random_zipf_placement(inst, line.gamma_c, mix_seed(seed, 1));
      result.analytic = line.mean_ratio;
      return result;
    }
    case Strategy::mpc:
      result.placement = mpc_placement(inst.popularity, inst.caps, inst.contacts.num_users);
      result.analytic = offloading_ratio(result.placement, inst);
      return result;
    default:
      throw std::logic_error("strategy not valid for terminals");
  }
}

std::vector<ResultRow> run_grid_point_bs(const ExperimentConfig& cfg,
                                         const PathScenarioSet& scenarios, std::size_t grid_index) {
  const double gamma = cfg.gamma_grid[grid_index];
  const auto inst = make_bs_instance(cfg, scenarios, gamma);
  std::vector<ResultRow> rows;
  for (Strategy strategy : cfg.strategies) {
    const std::uint64_t seed =
        mix_seed(cfg.seed, grid_index, static_cast<std::uint64_t>(strategy));
    const auto placement = compute_placement(cfg, strategy, inst, seed);

    double failure = 0.0, served = 0.0;
    if (const auto* coded = std::get_if<CodedPlacement>(&placement)) {
      failure = failure_probability(*coded, inst);
      served = served_fraction_objective(*coded, inst);
    } else {
      const auto& disc = std::get<DiscretePlacement>(placement);
      failure = failure_probability(disc, inst);
      CodedPlacement as_coded;
      as_coded.x.assign(disc.num_nodes(), std::vector<double>(disc.num_files(), 0.0));
      for (std::size_t n = 0; n < disc.num_nodes(); ++n)
        for (std::size_t f = 0; f < disc.num_files(); ++f)
          as_coded.x[n][f] = disc.stored[n][f];
      served = served_fraction_objective(as_coded, inst);
    }
    rows.push_back({"gamma", gamma, to_string(strategy), "failure_prob", failure, 0.0, seed});
    rows.push_back({"gamma", gamma, to_string(strategy), "served_fraction", served, 0.0, seed});

    if (cfg.trials > 0) {
      const std::uint64_t replay_seed = mix_seed(seed, kReplayStream);
      ReplayReport report;
      if (const auto* coded = std::get_if<CodedPlacement>(&placement))
        report = simulate_bs_replay(inst.scenarios, *coded, inst.popularity, inst.rate, cfg.trials,
                                    replay_seed);
      else
        report = simulate_bs_replay(inst.scenarios, std::get<DiscretePlacement>(placement),
                                    inst.popularity, inst.rate, cfg.trials, replay_seed);
      rows.push_back({"gamma", gamma, to_string(strategy), "replay_failure_prob",
                      report.empirical_value, report.std_error, replay_seed});
    }
  }
  return rows;
}

std::vector<ResultRow> run_grid_point_ut(const ExperimentConfig& cfg, const ContactModel& contacts,
                                         std::size_t grid_index) {
  const double gamma = cfg.gamma_grid[grid_index];
  const auto inst = make_ut_instance(cfg, contacts, gamma);
  std::vector<ResultRow> rows;
  for (Strategy strategy : cfg.strategies) {
    const std::uint64_t seed =
        mix_seed(cfg.seed, grid_index, static_cast<std::uint64_t>(strategy));
    const auto result = compute_ut_strategy(cfg, strategy, inst, seed);
    rows.push_back(
        {"gamma", gamma, to_string(strategy), "offloading_ratio", result.analytic, 0.0, seed});

    if (cfg.trials > 0) {
      const std::uint64_t replay_seed = mix_seed(seed, kReplayStream);
      const auto report = simulate_ut_replay(contacts, result.placement, inst.popularity,
                                             inst.delay_threshold_s, cfg.trials, replay_seed);
      rows.push_back({"gamma", gamma, to_string(strategy), "replay_offloading_ratio",
                      report.empirical_value, report.std_error, replay_seed});
    }
  }
  return rows;
}

double single_gamma(const ExperimentConfig& cfg) {
  if (cfg.request_gamma >= 0.0) return cfg.request_gamma;
  if (!cfg.gamma_grid.empty()) return cfg.gamma_grid.front();
  throw ConfigError("request.gamma", "required for this command");
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg) {
  if (cfg.gamma_grid.empty()) throw ConfigError("sweep.gamma", "required for sweeps");

  ResultTable table;
  std::vector<std::vector<ResultRow>> per_point(cfg.gamma_grid.size());

  auto run_points = [&](auto&& point_fn) {
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= cfg.gamma_grid.size()) break;
        per_point[i] = point_fn(i);
      }
    };
    const std::size_t jobs = std::min<std::size_t>(std::max<std::size_t>(cfg.jobs, 1),
                                                   cfg.gamma_grid.size());
    if (jobs <= 1) {
      worker();
    } else {
      std::vector<std::thread> threads;
      for (std::size_t t = 0; t < jobs; ++t) threads.emplace_back(worker);
      for (auto& th : threads) th.join();
    }
  };

  if (cfg.kind == ScenarioKind::bs) {
    const auto scenarios = bs_scenarios_from_config(cfg);
    run_points([&](std::size_t i) { return run_grid_point_bs(cfg, scenarios, i); });
  } else {
    const auto contacts = ut_contacts_from_config(cfg);
    run_points([&](std::size_t i) { return run_grid_point_ut(cfg, contacts, i); });
  }

  for (auto& rows : per_point)
    table.rows.insert(table.rows.end(), rows.begin(), rows.end());
  sort_rows(table);
  return table;
}

std::vector<std::string> run_estimate(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir + "': " + ec.message());

  std::vector<std::string> written;
  if (cfg.kind == ScenarioKind::bs) {
    const auto trace = bs_trace_from_config(cfg);
    const auto model = estimate_transition_model(trace);
    const std::string transition = (fs::path(out_dir) / "transition.csv").string();
    const std::string stats = (fs::path(out_dir) / "cell_stats.csv").string();
    write_transition_model(model, transition, stats);
    written = {transition, stats};
  } else {
    if (cfg.ut_trace.empty())
      throw ConfigError("ut.trace", "estimate needs a contact trace");
    const auto trace = read_contact_trace_file(cfg.ut_trace);
    double window = cfg.window_s;
    if (window <= 0.0) {
      const auto [lo, hi] = trace.span();
      window = hi - lo;
    }
    const auto model = estimate_contact_model(trace, window, cfg.num_users);
    const std::string rates = (fs::path(out_dir) / "contact_rates.csv").string();
    write_contact_model(model, rates);
    written = {rates};
  }
  return written;
}

std::vector<std::string> run_optimize(const ExperimentConfig& cfg, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + out_dir + "': " + ec.message());
  if (cfg.strategies.size() != 1)
    throw ConfigError("strategies", "optimize expects exactly one strategy");

  const double gamma = single_gamma(cfg);
  const Strategy strategy = cfg.strategies.front();
  const std::uint64_t seed = mix_seed(cfg.seed, 0, static_cast<std::uint64_t>(strategy));
  const std::string path = (fs::path(out_dir) / "placement.csv").string();

  if (cfg.kind == ScenarioKind::bs) {
    const auto inst = make_bs_instance(cfg, bs_scenarios_from_config(cfg), gamma);
    const auto placement = compute_placement(cfg, strategy, inst, seed);
    if (const auto* coded = std::get_if<CodedPlacement>(&placement))
      write_placement(*coded, path);
    else
      write_placement(std::get<DiscretePlacement>(placement), path);
  } else {
    const auto inst = make_ut_instance(cfg, ut_contacts_from_config(cfg), gamma);
    write_placement(compute_ut_strategy(cfg, strategy, inst, seed).placement, path);
  }
  return {path};
}

std::vector<std::string> run_evaluate(const ExperimentConfig& cfg, const std::string& out_dir) {
  if (cfg.placement_path.empty())
    throw ConfigError("placement", "evaluate needs a placement file");
  const double gamma = single_gamma(cfg);

  ResultTable table;
  if (cfg.kind == ScenarioKind::bs) {
    const auto inst = make_bs_instance(cfg, bs_scenarios_from_config(cfg), gamma);
    const auto placement = read_placement(cfg.placement_path, cfg.num_bs, cfg.num_files);
    double failure = 0.0;
    ReplayReport report;
    if (const auto* coded = std::get_if<CodedPlacement>(&placement)) {
      failure = failure_probability(*coded, inst);
      if (cfg.trials > 0)
        report = simulate_bs_replay(inst.scenarios, *coded, inst.popularity, inst.rate, cfg.trials,
                                    mix_seed(cfg.seed, kReplayStream));
    } else {
      const auto& disc = std::get<DiscretePlacement>(placement);
      failure = failure_probability(disc, inst);
      if (cfg.trials > 0)
        report = simulate_bs_replay(inst.scenarios, disc, inst.popularity, inst.rate, cfg.trials,
                                    mix_seed(cfg.seed, kReplayStream));
    }
    table.rows.push_back({"gamma", gamma, "file", "failure_prob", failure, 0.0, cfg.seed});
    if (cfg.trials > 0)
      table.rows.push_back({"gamma", gamma, "file", "replay_failure_prob", report.empirical_value,
                            report.std_error, report.seed});
  } else {
    const auto contacts = ut_contacts_from_config(cfg);
    const auto inst = make_ut_instance(cfg, contacts, gamma);
    const auto placement = read_placement(cfg.placement_path, cfg.num_users, cfg.num_files);
    if (!std::holds_alternative<DiscretePlacement>(placement))
      throw std::runtime_error("terminal placements must be whole-file (0/1 fractions)");
    const auto& disc = std::get<DiscretePlacement>(placement);
    table.rows.push_back(
        {"gamma", gamma, "file", "offloading_ratio", offloading_ratio(disc, inst), 0.0, cfg.seed});
    if (cfg.trials > 0) {
      const auto report = simulate_ut_replay(contacts, disc, inst.popularity,
                                             inst.delay_threshold_s, cfg.trials,
                                             mix_seed(cfg.seed, kReplayStream));
      table.rows.push_back({"gamma", gamma, "file", "replay_offloading_ratio",
                            report.empirical_value, report.std_error, report.seed});
    }
  }
  return emit_report(std::move(table), out_dir, /*with_svg=*/false);
}

std::vector<std::string> run_sweep(const ExperimentConfig& cfg, const std::string& out_dir) {
  return emit_report(run_experiment(cfg), out_dir, cfg.emit_svg);
}

}  // namespace mobcache::bench
