#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mobcache/mobility.hpp"
#include "mobcache/model.hpp"

namespace mobcache {

/// One cache-placement problem at user terminals: pairwise Poisson contact
/// intensities, request popularity, the tolerated delay before falling back
/// to the infrastructure, and integer per-terminal capacities.
struct UtInstance {
  ContactModel contacts;
  ZipfPopularity popularity;
  double delay_threshold_s = 0.0;
  Capacities caps;
};

/// Probability that `user`'s request for `file` is served over D2D: 1 when
/// self-cached, otherwise the chance that the first contact with any holder
/// of the file arrives within the delay threshold,
/// 1 - exp(-threshold * sum of holder contact rates).
double offload_probability(std::size_t user, std::size_t file, const DiscretePlacement& placement,
                           const UtInstance& inst);

/// Expected fraction of requests served via D2D (own cache counts),
/// averaged over users and request popularity.
double offloading_ratio(const DiscretePlacement& placement, const UtInstance& inst);

struct GreedyStep {
  std::size_t user = 0;
  std::size_t file = 0;
  double gain = 0.0;
};

/// Greedy maximization of offloading_ratio over the per-terminal capacity
/// matroid: repeatedly adds the (user, file) element with the largest
/// marginal gain, ties toward (lower user, lower file). Gains are kept
/// incrementally via per-(user, file) holder-rate sums. When `steps` is
/// given, the chosen elements and their gains are appended to it.
DiscretePlacement greedy_placement(const UtInstance& inst, std::vector<GreedyStep>* steps = nullptr);

/// Every terminal independently draws its capacity's worth of distinct files
/// by successive without-replacement Zipf(gamma_c) sampling.
DiscretePlacement random_zipf_placement(const UtInstance& inst, double gamma_c, std::uint64_t seed);

struct LineSearchResult {
  double gamma_c = 0.0;
  double mean_ratio = 0.0;
};

/// Estimates the expected offloading ratio of random Zipf placement at every
/// grid value over `trials` draws and returns the argmax (ties toward the
/// smaller gamma).
LineSearchResult line_search_gamma(const UtInstance& inst, std::span<const double> grid,
                                   std::size_t trials, std::uint64_t seed);

/// Exhaustive maximizer of offloading_ratio; refuses instances with more
/// than 1e6 placements. Ties resolve to the lexicographically first
/// placement in per-user subset order.
DiscretePlacement brute_force_placement(const UtInstance& inst);

}  // namespace mobcache
