#include "mobcache/bench/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace mobcache::bench {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

double to_double(const std::string& value, const std::string& field) {
  double out = 0.0;
  const char* first = value.data();
  const char* last = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc{} || ptr != last)
    throw ConfigError(field, "expected a number, got '" + value + "'");
  return out;
}

std::size_t to_count(const std::string& value, const std::string& field) {
  const double v = to_double(value, field);
  if (v < 0.0 || std::floor(v) != v)
    throw ConfigError(field, "expected a nonnegative integer, got '" + value + "'");
  return static_cast<std::size_t>(v);
}

std::vector<double> to_list(const std::string& value, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError(field, "empty list element");
    out.push_back(to_double(item, field));
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

bool to_bool(const std::string& value, const std::string& field) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(field, "expected true/false, got '" + value + "'");
}

}  // namespace

const char* to_string(Strategy s) {
  switch (s) {
    case Strategy::coded: return "coded";
    case Strategy::uncoded_exact: return "uncoded_exact";
    case Strategy::uncoded_local: return "uncoded_local";
    case Strategy::greedy: return "greedy";
    case Strategy::random_zipf: return "random_zipf";
    case Strategy::mpc: return "mpc";
  }
  return "?";
}

Strategy strategy_from_string(const std::string& name, const std::string& field) {
  for (Strategy s : {Strategy::coded, Strategy::uncoded_exact, Strategy::uncoded_local,
                     Strategy::greedy, Strategy::random_zipf, Strategy::mpc})
    if (name == to_string(s)) return s;
  throw ConfigError(field, "unknown strategy '" + name + "'");
}

ExperimentConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no), "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("line " + std::to_string(line_no), "empty key");
    if (kv.count(key)) throw ConfigError(key, "duplicate key");
    kv[key] = value;
  }

  ExperimentConfig cfg;
  auto take = [&](const char* key) -> std::string {
    auto it = kv.find(key);
    if (it == kv.end()) return {};
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto has = [&](const char* key) { return kv.count(key) > 0; };

  // scenario kind first; it decides which sections are legal
  {
    const std::string kind = take("kind");
    if (kind.empty()) throw ConfigError("kind", "required (bs or ut)");
    if (kind == "bs")
      cfg.kind = ScenarioKind::bs;
    else if (kind == "ut")
      cfg.kind = ScenarioKind::ut;
    else
      throw ConfigError("kind", "expected bs or ut, got '" + kind + "'");
  }

  if (has("seed")) cfg.seed = to_count(take("seed"), "seed");
  if (has("trials")) cfg.trials = to_count(take("trials"), "trials");
  if (has("jobs")) cfg.jobs = std::max<std::size_t>(1, to_count(take("jobs"), "jobs"));

  cfg.num_files = to_count(take("files.count"), "files.count");
  if (cfg.num_files == 0) throw ConfigError("files.count", "required and positive");

  if (has("sweep.gamma")) cfg.gamma_grid = to_list(take("sweep.gamma"), "sweep.gamma");
  if (has("request.gamma")) cfg.request_gamma = to_double(take("request.gamma"), "request.gamma");

  {
    const std::string list = take("strategies");
    if (list.empty()) throw ConfigError("strategies", "required, comma-separated");
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) throw ConfigError("strategies", "empty list element");
      cfg.strategies.push_back(strategy_from_string(item, "strategies"));
    }
    if (cfg.strategies.empty()) throw ConfigError("strategies", "empty strategy list");
    for (Strategy s : cfg.strategies) {
      const bool is_bs =
          s == Strategy::coded || s == Strategy::uncoded_exact || s == Strategy::uncoded_local;
      const bool is_ut = s == Strategy::greedy || s == Strategy::random_zipf;
      if (cfg.kind == ScenarioKind::bs && is_ut)
        throw ConfigError("strategies",
                          std::string(to_string(s)) + " is a terminal strategy; kind is bs");
      if (cfg.kind == ScenarioKind::ut && is_bs)
        throw ConfigError("strategies",
                          std::string(to_string(s)) + " is a base-station strategy; kind is ut");
    }
  }

  if (cfg.kind == ScenarioKind::bs) {
    cfg.num_bs = to_count(take("bs.num_bs"), "bs.num_bs");
    if (cfg.num_bs == 0) throw ConfigError("bs.num_bs", "required and positive");
    if (has("bs.capacities")) {
      cfg.bs_capacities = to_list(take("bs.capacities"), "bs.capacities");
      if (cfg.bs_capacities.size() != cfg.num_bs)
        throw ConfigError("bs.capacities", "expected one entry per station");
    } else {
      cfg.bs_capacities.assign(cfg.num_bs, to_double(take("bs.capacity"), "bs.capacity"));
    }
    cfg.rate = to_double(take("bs.rate"), "bs.rate");
    if (!(cfg.rate > 0.0)) throw ConfigError("bs.rate", "must be positive");

    cfg.bs_trace = take("bs.trace");
    cfg.bs_transition = take("bs.transition");
    cfg.bs_cell_stats = take("bs.cell_stats");
    if (cfg.bs_transition.empty() != cfg.bs_cell_stats.empty())
      throw ConfigError("bs.transition", "bs.transition and bs.cell_stats come as a pair");

    if (has("paths.source")) {
      cfg.paths_source = take("paths.source");
      if (cfg.paths_source != "windows" && cfg.paths_source != "markov")
        throw ConfigError("paths.source", "expected windows or markov");
    }
    if (has("paths.horizon_s")) cfg.horizon_s = to_double(take("paths.horizon_s"), "paths.horizon_s");
    if (has("paths.num_paths")) cfg.num_paths = to_count(take("paths.num_paths"), "paths.num_paths");

    if (has("mobility.area_width_m")) {
      cfg.have_waypoint = true;
      cfg.waypoint.area_width_m = to_double(take("mobility.area_width_m"), "mobility.area_width_m");
      cfg.waypoint.area_height_m =
          to_double(take("mobility.area_height_m"), "mobility.area_height_m");
      cfg.waypoint.cells_x = to_count(take("mobility.cells_x"), "mobility.cells_x");
      cfg.waypoint.cells_y = to_count(take("mobility.cells_y"), "mobility.cells_y");
      cfg.waypoint.speed_min_mps = to_double(take("mobility.speed_min_mps"), "mobility.speed_min_mps");
      cfg.waypoint.speed_max_mps = to_double(take("mobility.speed_max_mps"), "mobility.speed_max_mps");
      if (has("mobility.pause_min_s"))
        cfg.waypoint.pause_min_s = to_double(take("mobility.pause_min_s"), "mobility.pause_min_s");
      if (has("mobility.pause_max_s"))
        cfg.waypoint.pause_max_s = to_double(take("mobility.pause_max_s"), "mobility.pause_max_s");
      cfg.waypoint.duration_s = to_double(take("mobility.duration_s"), "mobility.duration_s");
      cfg.waypoint.num_users = to_count(take("mobility.num_users"), "mobility.num_users");
      if (cfg.waypoint.cells_x * cfg.waypoint.cells_y != cfg.num_bs)
        throw ConfigError("mobility.cells_x", "grid cell count must equal bs.num_bs");
    }

    const bool have_model = !cfg.bs_transition.empty();
    if (cfg.bs_trace.empty() && !have_model && !cfg.have_waypoint)
      throw ConfigError("bs.trace", "need a trace, fitted model files, or mobility.* generator");
    if (!(cfg.horizon_s > 0.0))
      throw ConfigError("paths.horizon_s", "required and positive for bs scenarios");
    if ((have_model || cfg.paths_source == "markov") && cfg.num_paths == 0)
      throw ConfigError("paths.num_paths", "required when sampling from a fitted chain");
  } else {
    cfg.num_users = to_count(take("ut.num_users"), "ut.num_users");
    if (cfg.num_users == 0) throw ConfigError("ut.num_users", "required and positive");
    if (has("ut.capacities")) {
      cfg.ut_capacities = to_list(take("ut.capacities"), "ut.capacities");
      if (cfg.ut_capacities.size() != cfg.num_users)
        throw ConfigError("ut.capacities", "expected one entry per user");
    } else {
      cfg.ut_capacities.assign(cfg.num_users, to_double(take("ut.capacity"), "ut.capacity"));
    }
    cfg.delay_threshold_s = to_double(take("ut.delay_threshold_s"), "ut.delay_threshold_s");
    if (!(cfg.delay_threshold_s > 0.0))
      throw ConfigError("ut.delay_threshold_s", "must be positive");

    cfg.ut_trace = take("ut.trace");
    cfg.ut_rates = take("ut.rates");
    if (has("ut.window_s")) cfg.window_s = to_double(take("ut.window_s"), "ut.window_s");

    if (has("contacts.rate_min")) {
      cfg.have_contact_gen = true;
      cfg.contact_rate_min = to_double(take("contacts.rate_min"), "contacts.rate_min");
      cfg.contact_rate_max = to_double(take("contacts.rate_max"), "contacts.rate_max");
      if (cfg.contact_rate_min < 0.0 || cfg.contact_rate_max < cfg.contact_rate_min)
        throw ConfigError("contacts.rate_min", "need 0 <= rate_min <= rate_max");
    }
    if (cfg.ut_trace.empty() && cfg.ut_rates.empty() && !cfg.have_contact_gen)
      throw ConfigError("ut.trace", "need a trace, a fitted rate matrix, or contacts.* generator");

    if (has("random_zipf.grid"))
      cfg.gamma_c_grid = to_list(take("random_zipf.grid"), "random_zipf.grid");
    if (has("random_zipf.trials"))
      cfg.gamma_c_trials = to_count(take("random_zipf.trials"), "random_zipf.trials");
    if (cfg.gamma_c_trials == 0) throw ConfigError("random_zipf.trials", "must be positive");
  }

  if (has("coded.iterations"))
    cfg.coded_iterations = to_count(take("coded.iterations"), "coded.iterations");
  if (has("uncoded.restarts"))
    cfg.uncoded_restarts = std::max<std::size_t>(1, to_count(take("uncoded.restarts"), "uncoded.restarts"));
  cfg.placement_path = take("placement");
  if (has("report.svg")) cfg.emit_svg = to_bool(take("report.svg"), "report.svg");

  if (!kv.empty()) throw ConfigError(kv.begin()->first, "unknown key");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  return parse_config(in);
}

}  // namespace mobcache::bench
