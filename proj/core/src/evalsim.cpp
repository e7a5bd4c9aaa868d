#include "mobcache/evalsim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "mobcache/bs_place.hpp"
#include "mobcache/rng.hpp"
#include "mobcache/ut_place.hpp"

namespace mobcache {

namespace {

double binomial_std_error(double p_hat, std::size_t trials) {
  return std::sqrt(std::max(p_hat * (1.0 - p_hat), 0.0) / static_cast<double>(trials));
}

struct OrderedPath {
  std::vector<std::pair<std::size_t, double>> visits;  // (cell, sojourn seconds)
  double weight = 0.0;
};

struct OrderedPathSet {
  std::vector<OrderedPath> paths;
  std::size_t num_cells = 0;
};

OrderedPathSet ordered_paths(const AssociationTrace& trace) {
  if (trace.records.empty()) throw std::invalid_argument("simulate_bs_replay: empty trace");
  OrderedPathSet set;
  set.num_cells = trace.num_cells();
  std::size_t i = 0;
  while (i < trace.records.size()) {
    OrderedPath path;
    const std::size_t user = trace.records[i].user;
    while (i < trace.records.size() && trace.records[i].user == user) {
      const auto& r = trace.records[i];
      path.visits.emplace_back(r.cell, r.exit_s - r.enter_s);
      ++i;
    }
    set.paths.push_back(std::move(path));
  }
  for (auto& p : set.paths) p.weight = 1.0 / static_cast<double>(set.paths.size());
  return set;
}

OrderedPathSet ordered_paths(const PathScenarioSet& scenarios) {
  if (scenarios.scenarios.empty())
    throw std::invalid_argument("simulate_bs_replay: empty scenario set");
  OrderedPathSet set;
  set.num_cells = scenarios.num_cells();
  for (const auto& s : scenarios.scenarios) {
    OrderedPath path;
    path.weight = s.weight;
    for (std::size_t n = 0; n < s.per_cell_sojourn_s.size(); ++n)
      if (s.per_cell_sojourn_s[n] > 0.0) path.visits.emplace_back(n, s.per_cell_sojourn_s[n]);
    set.paths.push_back(std::move(path));
  }
  return set;
}

PathScenarioSet collapse(const OrderedPathSet& set) {
  PathScenarioSet scenarios;
  scenarios.scenarios.resize(set.paths.size());
  for (std::size_t p = 0; p < set.paths.size(); ++p) {
    auto& s = scenarios.scenarios[p];
    s.weight = set.paths[p].weight;
    s.per_cell_sojourn_s.assign(set.num_cells, 0.0);
    for (const auto& [cell, sojourn] : set.paths[p].visits) s.per_cell_sojourn_s[cell] += sojourn;
  }
  return scenarios;
}

ReplayReport bs_replay_impl(const OrderedPathSet& set, std::vector<std::vector<double>> x,
                            const ZipfPopularity& pop, double rate, std::size_t trials,
                            std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("simulate_bs_replay: need at least one trial");
  if (x.size() != set.num_cells || (!x.empty() && x[0].size() != pop.num_files))
    throw std::invalid_argument("simulate_bs_replay: placement dimensions mismatch");

  BsInstance inst;
  inst.scenarios = collapse(set);
  inst.popularity = pop;
  inst.rate = rate;
  inst.num_bs = set.num_cells;
  inst.caps.per_node.assign(set.num_cells, 0.0);
  for (std::size_t n = 0; n < set.num_cells; ++n)
    for (double xi : x[n]) inst.caps.per_node[n] += xi;
  CodedPlacement coded;
  coded.x = x;
  const double analytic = failure_probability(coded, inst);

  std::vector<double> path_cdf(set.paths.size());
  double acc = 0.0;
  for (std::size_t p = 0; p < set.paths.size(); ++p) {
    acc += set.paths[p].weight;
    path_cdf[p] = acc;
  }
  path_cdf.back() = 1.0;

  const RequestSampler request(pop);
  std::vector<double> downloaded(set.num_cells);
  std::size_t failures = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = make_rng(mix_seed(seed, trial));
    const double u = uniform01(rng);
    const auto pick = static_cast<std::size_t>(
        std::upper_bound(path_cdf.begin(), path_cdf.end(), u) - path_cdf.begin());
    const auto& path = set.paths[std::min(pick, set.paths.size() - 1)];
    const std::size_t file = request(rng);

    std::fill(downloaded.begin(), downloaded.end(), 0.0);
    double total = 0.0;
    for (const auto& [cell, sojourn] : path.visits) {
      const double take = std::min(x[cell][file] - downloaded[cell], rate * sojourn);
      if (take > 0.0) {
        downloaded[cell] += take;
        total += take;
      }
    }
    if (total < 1.0 - kCompletionTol) ++failures;
  }

  ReplayReport report;
  report.metric_name = "failure_prob";
  report.analytic_value = analytic;
  report.empirical_value = static_cast<double>(failures) / static_cast<double>(trials);
  report.trials = trials;
  report.std_error = binomial_std_error(report.empirical_value, trials);
  report.seed = seed;
  return report;
}

std::vector<std::vector<double>> dense(const DiscretePlacement& placement) {
  std::vector<std::vector<double>> x(placement.num_nodes(),
                                     std::vector<double>(placement.num_files(), 0.0));
  for (std::size_t n = 0; n < placement.num_nodes(); ++n)
    for (std::size_t f = 0; f < placement.num_files(); ++f)
      x[n][f] = placement.stored[n][f] ? 1.0 : 0.0;
  return x;
}

}  // namespace

ReplayReport simulate_bs_replay(const AssociationTrace& trace, const CodedPlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed) {
  return bs_replay_impl(ordered_paths(trace), placement.x, pop, rate, trials, seed);
}

ReplayReport simulate_bs_replay(const AssociationTrace& trace, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed) {
  return bs_replay_impl(ordered_paths(trace), dense(placement), pop, rate, trials, seed);
}

ReplayReport simulate_bs_replay(const PathScenarioSet& paths, const CodedPlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed) {
  return bs_replay_impl(ordered_paths(paths), placement.x, pop, rate, trials, seed);
}

ReplayReport simulate_bs_replay(const PathScenarioSet& paths, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed) {
  return bs_replay_impl(ordered_paths(paths), dense(placement), pop, rate, trials, seed);
}

ReplayReport simulate_ut_replay(const ContactTrace& contacts, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double delay_threshold_s,
                                std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("simulate_ut_replay: need at least one trial");
  if (!(delay_threshold_s > 0.0))
    throw std::invalid_argument("simulate_ut_replay: delay threshold must be positive");
  const auto [span_lo, span_hi] = contacts.span();
  if (span_hi - span_lo < delay_threshold_s)
    throw std::invalid_argument("simulate_ut_replay: trace span shorter than delay threshold");
  const std::size_t num_users = placement.num_nodes();
  if (contacts.num_users() > num_users || placement.num_files() != pop.num_files)
    throw std::invalid_argument("simulate_ut_replay: dimensions mismatch");

  // Per-user contact events sorted by start time.
  std::vector<std::vector<std::pair<double, std::size_t>>> events(num_users);
  for (const auto& r : contacts.records) {
    events[r.user_a].emplace_back(r.start_s, r.user_b);
    events[r.user_b].emplace_back(r.start_s, r.user_a);
  }
  for (auto& e : events) std::sort(e.begin(), e.end());

  const RequestSampler request(pop);
  std::size_t served = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = make_rng(mix_seed(seed, trial));
    const std::size_t user = uniform_index(rng, num_users);
    const double t = uniform_range(rng, span_lo, span_hi - delay_threshold_s);
    const std::size_t file = request(rng);

    if (placement.stored[user][file]) {
      ++served;
      continue;
    }
    const auto& ev = events[user];
    auto it = std::lower_bound(ev.begin(), ev.end(), std::make_pair(t, std::size_t{0}));
    for (; it != ev.end() && it->first <= t + delay_threshold_s; ++it) {
      if (placement.stored[it->second][file]) {
        ++served;
        break;
      }
    }
  }

  ReplayReport report;
  report.metric_name = "offloading_ratio";
  report.analytic_value = std::nullopt;
  report.empirical_value = static_cast<double>(served) / static_cast<double>(trials);
  report.trials = trials;
  report.std_error = binomial_std_error(report.empirical_value, trials);
  report.seed = seed;
  return report;
}

ReplayReport simulate_ut_replay(const ContactModel& contacts, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double delay_threshold_s,
                                std::size_t trials, std::uint64_t seed) {
  if (trials == 0) throw std::invalid_argument("simulate_ut_replay: need at least one trial");
  UtInstance inst;
  inst.contacts = contacts;
  inst.popularity = pop;
  inst.delay_threshold_s = delay_threshold_s;
  inst.caps.per_node.assign(contacts.num_users, 0.0);
  for (std::size_t i = 0; i < placement.num_nodes() && i < contacts.num_users; ++i)
    for (std::size_t f = 0; f < placement.num_files(); ++f)
      inst.caps.per_node[i] += placement.stored[i][f];
  const double analytic = offloading_ratio(placement, inst);

  const std::size_t num_users = contacts.num_users;
  const RequestSampler request(pop);
  std::size_t served = 0;
  for (std::size_t trial = 0; trial < trials; ++trial) {
    auto rng = make_rng(mix_seed(seed, trial));
    const std::size_t user = uniform_index(rng, num_users);
    const std::size_t file = request(rng);
    if (placement.stored[user][file]) {
      ++served;
      continue;
    }
    double holder_rate = 0.0;
    for (std::size_t j = 0; j < num_users; ++j)
      if (j != user && placement.stored[j][file]) holder_rate += contacts.rate[user][j];
    if (holder_rate <= 0.0) continue;
    // First arrival of the superposed holder contact process.
    const double delay = exponential(rng, 1.0 / holder_rate);
    if (delay <= delay_threshold_s) ++served;
  }

  ReplayReport report;
  report.metric_name = "offloading_ratio";
  report.analytic_value = analytic;
  report.empirical_value = static_cast<double>(served) / static_cast<double>(trials);
  report.trials = trials;
  report.std_error = binomial_std_error(report.empirical_value, trials);
  report.seed = seed;
  return report;
}

}  // namespace mobcache
