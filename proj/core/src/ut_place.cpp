#include "mobcache/ut_place.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mobcache/rng.hpp"

namespace mobcache {

namespace {

void check_instance(const UtInstance& inst) {
  if (inst.contacts.num_users == 0) throw std::invalid_argument("UtInstance: no users");
  if (!(inst.delay_threshold_s > 0.0))
    throw std::invalid_argument("UtInstance: delay threshold must be positive");
  if (inst.caps.per_node.size() != inst.contacts.num_users)
    throw std::invalid_argument("UtInstance: capacity vector length mismatch");
  if (inst.contacts.rate.size() != inst.contacts.num_users)
    throw std::invalid_argument("UtInstance: rate matrix size mismatch");
}

void check_dims(const DiscretePlacement& placement, const UtInstance& inst) {
  if (placement.num_nodes() != inst.contacts.num_users ||
      placement.num_files() != inst.popularity.num_files)
    throw std::invalid_argument("placement dimensions do not match instance");
}

std::vector<std::size_t> integer_caps(const UtInstance& inst) {
  std::vector<std::size_t> caps(inst.contacts.num_users);
  for (std::size_t i = 0; i < caps.size(); ++i) {
    const double c = inst.caps.per_node[i];
    if (c < 0.0 || std::floor(c) != c)
      throw std::invalid_argument("UT capacities must be nonnegative integers");
    caps[i] = static_cast<std::size_t>(c);
  }
  return caps;
}

}  // namespace

double offload_probability(std::size_t user, std::size_t file, const DiscretePlacement& placement,
                           const UtInstance& inst) {
  check_instance(inst);
  check_dims(placement, inst);
  if (user >= inst.contacts.num_users || file >= inst.popularity.num_files)
    throw std::invalid_argument("offload_probability: index out of range");
  if (placement.stored[user][file]) return 1.0;
  double holder_rate = 0.0;
  for (std::size_t j = 0; j < inst.contacts.num_users; ++j)
    if (j != user && placement.stored[j][file]) holder_rate += inst.contacts.rate[user][j];
  return -std::expm1(-inst.delay_threshold_s * holder_rate);
}

double offloading_ratio(const DiscretePlacement& placement, const UtInstance& inst) {
  check_instance(inst);
  check_dims(placement, inst);
  const std::size_t num_users = inst.contacts.num_users;
  const std::size_t num_files = inst.popularity.num_files;

  // holder_rate[i][f] = total contact intensity between i and the holders of f.
  std::vector<std::vector<double>> holder_rate(num_users, std::vector<double>(num_files, 0.0));
  for (std::size_t j = 0; j < num_users; ++j)
    for (std::size_t f = 0; f < num_files; ++f)
      if (placement.stored[j][f])
        for (std::size_t i = 0; i < num_users; ++i)
          if (i != j) holder_rate[i][f] += inst.contacts.rate[i][j];

  // File-major accumulation: the per-file user average is exact (1.0 per
  // user) whenever everyone self-caches the file, which keeps the
  // most-popular-content ratio independent of the user count and the rates.
  double ratio = 0.0;
  for (std::size_t f = 0; f < num_files; ++f) {
    double served = 0.0;
    for (std::size_t i = 0; i < num_users; ++i) {
      if (placement.stored[i][f])
        served += 1.0;
      else
        served += -std::expm1(-inst.delay_threshold_s * holder_rate[i][f]);
    }
    ratio += inst.popularity.pmf[f] * (served / static_cast<double>(num_users));
  }
  return ratio;
}

DiscretePlacement greedy_placement(const UtInstance& inst, std::vector<GreedyStep>* steps) {
  check_instance(inst);
  const std::size_t num_users = inst.contacts.num_users;
  const std::size_t num_files = inst.popularity.num_files;
  const double tau = inst.delay_threshold_s;
  const auto caps = integer_caps(inst);

  std::size_t total_capacity = 0;
  for (std::size_t c : caps) total_capacity += std::min(c, num_files);

  DiscretePlacement placement;
  placement.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
  std::vector<std::size_t> residual(caps.begin(), caps.end());

  // holder_rate[i][f] as in offloading_ratio, maintained incrementally.
  std::vector<std::vector<double>> holder_rate(num_users, std::vector<double>(num_files, 0.0));

  // gain[u][f] = marginal increase of offloading_ratio from adding (u, f).
  // Only column f changes when an element with file f is added, so each
  // round rescans the table in O(users * files) and rebuilds one column.
  std::vector<std::vector<double>> gain(num_users, std::vector<double>(num_files, 0.0));
  auto element_gain = [&](std::size_t u, std::size_t f) {
    double total = std::exp(-tau * holder_rate[u][f]);  // u's own request
    for (std::size_t i = 0; i < num_users; ++i) {
      if (i == u || placement.stored[i][f]) continue;
      total += std::exp(-tau * holder_rate[i][f]) * -std::expm1(-tau * inst.contacts.rate[i][u]);
    }
    return inst.popularity.pmf[f] * total / static_cast<double>(num_users);
  };
  for (std::size_t u = 0; u < num_users; ++u)
    for (std::size_t f = 0; f < num_files; ++f) gain[u][f] = element_gain(u, f);

  for (std::size_t round = 0; round < total_capacity; ++round) {
    double best_gain = 0.0;
    std::size_t best_u = num_users, best_f = 0;
    for (std::size_t u = 0; u < num_users; ++u) {
      if (residual[u] == 0) continue;
      for (std::size_t f = 0; f < num_files; ++f) {
        if (placement.stored[u][f]) continue;
        if (gain[u][f] > best_gain) {
          best_gain = gain[u][f];
          best_u = u;
          best_f = f;
        }
      }
    }
    if (best_u == num_users) break;  // all remaining gains are zero

    placement.stored[best_u][best_f] = 1;
    --residual[best_u];
    if (steps) steps->push_back({best_u, best_f, best_gain});

    for (std::size_t i = 0; i < num_users; ++i)
      if (i != best_u) holder_rate[i][best_f] += inst.contacts.rate[i][best_u];
    for (std::size_t u = 0; u < num_users; ++u)
      if (residual[u] > 0 && !placement.stored[u][best_f]) gain[u][best_f] = element_gain(u, best_f);
  }
  return placement;
}

DiscretePlacement random_zipf_placement(const UtInstance& inst, double gamma_c,
                                        std::uint64_t seed) {
  check_instance(inst);
  if (!std::isfinite(gamma_c) || gamma_c < 0.0)
    throw std::invalid_argument("random_zipf_placement: gamma_c must be finite and nonnegative");
  const std::size_t num_users = inst.contacts.num_users;
  const std::size_t num_files = inst.popularity.num_files;
  const auto caps = integer_caps(inst);
  for (std::size_t c : caps)
    if (c > num_files)
      throw std::invalid_argument("random_zipf_placement: capacity exceeds library size");

  std::vector<double> weight(num_files);
  for (std::size_t f = 0; f < num_files; ++f)
    weight[f] = std::pow(static_cast<double>(f + 1), -gamma_c);

  DiscretePlacement placement;
  placement.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
  std::vector<double> w(num_files);
  for (std::size_t u = 0; u < num_users; ++u) {
    auto rng = make_rng(mix_seed(seed, u));
    w = weight;
    double norm = std::accumulate(w.begin(), w.end(), 0.0);
    for (std::size_t k = 0; k < caps[u]; ++k) {
      const double target = uniform01(rng) * norm;
      double acc = 0.0;
      std::size_t pick = num_files;
      for (std::size_t f = 0; f < num_files; ++f) {
        if (w[f] == 0.0) continue;
        acc += w[f];
        if (target < acc) {
          pick = f;
          break;
        }
      }
      if (pick == num_files) {
        // rounding pushed the target past the last bucket
        for (std::size_t f = num_files; f-- > 0;)
          if (w[f] > 0.0) {
            pick = f;
            break;
          }
      }
      placement.stored[u][pick] = 1;
      norm -= w[pick];
      w[pick] = 0.0;
    }
  }
  return placement;
}

LineSearchResult line_search_gamma(const UtInstance& inst, std::span<const double> grid,
                                   std::size_t trials, std::uint64_t seed) {
  check_instance(inst);
  if (grid.empty()) throw std::invalid_argument("line_search_gamma: empty grid");
  if (trials == 0) throw std::invalid_argument("line_search_gamma: need at least one trial");

  LineSearchResult best{grid[0], -1.0};
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double mean = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto placement = random_zipf_placement(inst, grid[g], mix_seed(seed, g, t));
      mean += offloading_ratio(placement, inst);
    }
    mean /= static_cast<double>(trials);
    if (mean > best.mean_ratio || (mean == best.mean_ratio && grid[g] < best.gamma_c))
      best = {grid[g], mean};
  }
  return best;
}

DiscretePlacement brute_force_placement(const UtInstance& inst) {
  check_instance(inst);
  const std::size_t num_users = inst.contacts.num_users;
  const std::size_t num_files = inst.popularity.num_files;
  const auto caps = integer_caps(inst);

  double combinations = 1.0;
  for (std::size_t c : caps) {
    double choose = 1.0;
    const std::size_t k = std::min(c, num_files);
    for (std::size_t j = 0; j < k; ++j)
      choose = choose * static_cast<double>(num_files - j) / static_cast<double>(j + 1);
    combinations *= choose;
    if (combinations > 1e6)
      throw std::invalid_argument("brute_force_placement: instance too large");
  }

  DiscretePlacement placement;
  placement.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
  DiscretePlacement best = placement;
  double best_ratio = -1.0;

  // Per-user subsets in lexicographic order; first maximum wins.
  std::vector<std::vector<std::size_t>> combo(num_users);
  auto recurse = [&](auto&& self, std::size_t u) -> void {
    if (u == num_users) {
      const double ratio = offloading_ratio(placement, inst);
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best = placement;
      }
      return;
    }
    const std::size_t k = std::min(caps[u], num_files);
    if (k == 0) {
      self(self, u + 1);
      return;
    }
    auto& comb = combo[u];
    comb.resize(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    while (true) {
      for (std::size_t f : comb) placement.stored[u][f] = 1;
      self(self, u + 1);
      for (std::size_t f : comb) placement.stored[u][f] = 0;

      std::size_t i = k;
      while (i > 0 && comb[i - 1] == num_files - k + i - 1) --i;
      if (i == 0) break;
      ++comb[i - 1];
      for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
    }
  };
  recurse(recurse, 0);
  return best;
}

}  // namespace mobcache
