#include "mobcache/bench/selftest.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "mobcache/bs_place.hpp"
#include "mobcache/rng.hpp"
#include "mobcache/ut_place.hpp"

namespace mobcache::bench {

namespace {

BsInstance random_bs_instance(std::mt19937_64& rng) {
  BsInstance inst;
  inst.num_bs = 1 + uniform_index(rng, 3);
  const std::size_t num_files = 1 + uniform_index(rng, 4);
  inst.popularity = zipf_pmf(num_files, 2.0 * uniform01(rng));
  inst.rate = 0.2 + uniform01(rng);
  inst.caps.per_node.assign(inst.num_bs, 1.0);
  const std::size_t scenarios = 1 + uniform_index(rng, 3);
  inst.scenarios.scenarios.resize(scenarios);
  for (auto& s : inst.scenarios.scenarios) {
    s.weight = 1.0 / static_cast<double>(scenarios);
    s.per_cell_sojourn_s.resize(inst.num_bs);
    for (auto& t : s.per_cell_sojourn_s) t = 2.0 * uniform01(rng);
  }
  return inst;
}

UtInstance random_ut_instance(std::mt19937_64& rng) {
  UtInstance inst;
  const std::size_t num_users = 1 + uniform_index(rng, 4);
  const std::size_t num_files = 1 + uniform_index(rng, 4);
  inst.contacts.num_users = num_users;
  inst.contacts.rate.assign(num_users, std::vector<double>(num_users, 0.0));
  for (std::size_t i = 0; i < num_users; ++i)
    for (std::size_t j = i + 1; j < num_users; ++j)
      inst.contacts.rate[i][j] = inst.contacts.rate[j][i] = uniform01(rng);
  inst.popularity = zipf_pmf(num_files, 2.0 * uniform01(rng));
  inst.delay_threshold_s = 0.3 + 2.0 * uniform01(rng);
  inst.caps.per_node.assign(num_users, 1.0);
  return inst;
}

// exhaustive minimum failure over per-station subsets of size <= capacity
double exhaustive_min_failure(const BsInstance& inst) {
  const std::size_t num_files = inst.popularity.num_files;
  DiscretePlacement placement;
  placement.stored.assign(inst.num_bs, std::vector<std::uint8_t>(num_files, 0));
  double best = 2.0;
  std::function<void(std::size_t)> recurse = [&](std::size_t n) {
    if (n == inst.num_bs) {
      best = std::min(best, failure_probability(placement, inst));
      return;
    }
    const auto cap = static_cast<std::size_t>(inst.caps.per_node[n]);
    for (std::size_t mask = 0; mask < (std::size_t{1} << num_files); ++mask) {
      std::size_t bits = 0;
      for (std::size_t f = 0; f < num_files; ++f) bits += (mask >> f) & 1;
      if (bits > cap) continue;
      for (std::size_t f = 0; f < num_files; ++f)
        placement.stored[n][f] = (mask >> f) & 1 ? 1 : 0;
      recurse(n + 1);
    }
    std::fill(placement.stored[n].begin(), placement.stored[n].end(), std::uint8_t{0});
  };
  recurse(0);
  return best;
}

struct Suite {
  const char* name;
  std::function<bool(std::string&)> body;
};

}  // namespace

int run_selftest(std::ostream& out) {
  std::vector<Suite> suites;

  suites.push_back({"zipf-normalization", [](std::string& note) {
    auto rng = make_rng(1);
    for (int it = 0; it < 500; ++it) {
      const auto pop = zipf_pmf(1 + uniform_index(rng, 150), 3.0 * uniform01(rng));
      double sum = 0.0;
      for (double p : pop.pmf) sum += p;
      if (std::abs(sum - 1.0) > 1e-12) return false;
      for (std::size_t f = 1; f < pop.num_files; ++f)
        if (pop.pmf[f] > pop.pmf[f - 1]) return false;
    }
    note = "500 random shapes";
    return true;
  }});

  suites.push_back({"projection-feasibility", [](std::string& note) {
    auto rng = make_rng(2);
    for (int it = 0; it < 500; ++it) {
      const std::size_t n = 1 + uniform_index(rng, 6);
      std::vector<double> v(n);
      for (auto& vi : v) vi = -1.0 + 3.0 * uniform01(rng);
      const double cap = 3.0 * uniform01(rng);
      const auto u = project_capped_simplex(v, cap);
      double sum = 0.0;
      for (double ui : u) {
        if (ui < -1e-9 || ui > 1.0 + 1e-9) return false;
        sum += ui;
      }
      if (sum > cap + 1e-9) return false;
      // projection optimality: no feasible random point may be closer to v
      double dist = 0.0;
      for (std::size_t i = 0; i < n; ++i) dist += (u[i] - v[i]) * (u[i] - v[i]);
      for (int r = 0; r < 50; ++r) {
        std::vector<double> w(n);
        for (auto& wi : w) wi = uniform01(rng);
        w = project_capped_simplex(w, cap);
        double wd = 0.0;
        for (std::size_t i = 0; i < n; ++i) wd += (w[i] - v[i]) * (w[i] - v[i]);
        if (wd < dist - 1e-9) return false;
      }
    }
    note = "500 projections, 50 feasibility probes each";
    return true;
  }});

  suites.push_back({"uncoded-exactness", [](std::string& note) {
    auto rng = make_rng(3);
    for (int it = 0; it < 40; ++it) {
      const auto inst = random_bs_instance(rng);
      const auto placement = optimize_uncoded(inst, UncodedMode::exact, 0);
      if (failure_probability(placement, inst) != exhaustive_min_failure(inst)) return false;
    }
    note = "40 instances vs exhaustive enumeration";
    return true;
  }});

  suites.push_back({"greedy-half-guarantee", [](std::string& note) {
    auto rng = make_rng(4);
    double mean_ratio = 0.0;
    int counted = 0;
    for (int it = 0; it < 60; ++it) {
      const auto inst = random_ut_instance(rng);
      const double got = offloading_ratio(greedy_placement(inst), inst);
      const double best = offloading_ratio(brute_force_placement(inst), inst);
      if (best < got - 1e-12) return false;
      if (got + 1e-12 < 0.5 * best) return false;
      if (best > 0.0) {
        mean_ratio += got / best;
        ++counted;
      }
    }
    note = "60 instances, mean greedy/optimal = " +
           std::to_string(mean_ratio / std::max(counted, 1));
    return true;
  }});

  suites.push_back({"submodularity-monotonicity", [](std::string& note) {
    auto rng = make_rng(5);
    for (int it = 0; it < 300; ++it) {
      const auto inst = random_ut_instance(rng);
      const std::size_t num_users = inst.contacts.num_users;
      const std::size_t num_files = inst.popularity.num_files;
      DiscretePlacement small, large;
      small.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
      large = small;
      for (std::size_t u = 0; u < num_users; ++u)
        for (std::size_t f = 0; f < num_files; ++f) {
          const double r = uniform01(rng);
          if (r < 0.25) small.stored[u][f] = large.stored[u][f] = 1;
          else if (r < 0.5) large.stored[u][f] = 1;
        }
      const std::size_t u = uniform_index(rng, num_users);
      const std::size_t f = uniform_index(rng, num_files);
      if (large.stored[u][f]) continue;
      auto small_plus = small, large_plus = large;
      small_plus.stored[u][f] = large_plus.stored[u][f] = 1;
      const double gs = offloading_ratio(small_plus, inst) - offloading_ratio(small, inst);
      const double gl = offloading_ratio(large_plus, inst) - offloading_ratio(large, inst);
      if (gs < -1e-12 || gl < -1e-12) return false;  // monotone
      if (gs < gl - 1e-12) return false;             // submodular
    }
    note = "300 random triples";
    return true;
  }});

  suites.push_back({"mpc-closed-form", [](std::string& note) {
    auto rng = make_rng(6);
    for (int it = 0; it < 100; ++it) {
      auto inst = random_ut_instance(rng);
      const auto cap = static_cast<std::size_t>(inst.caps.per_node[0]);
      const auto mpc = mpc_placement(inst.popularity, inst.caps, inst.contacts.num_users);
      double head = 0.0;
      for (std::size_t f = 0; f < std::min(cap, inst.popularity.num_files); ++f)
        head += inst.popularity.pmf[f];
      if (std::abs(offloading_ratio(mpc, inst) - head) > 1e-12) return false;
    }
    note = "100 instances, head-mass identity";
    return true;
  }});

  int failures = 0;
  for (auto& suite : suites) {
    std::string note;
    const bool ok = suite.body(note);
    out << (ok ? "PASS" : "FAIL") << "  " << suite.name;
    if (!note.empty()) out << "  (" << note << ")";
    out << '\n';
    if (!ok) ++failures;
  }
  return failures;
}

}  // namespace mobcache::bench
