#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mobcache/mobility.hpp"
#include "mobcache/model.hpp"

namespace mobcache {

/// A request is only a failure when the collected fraction falls short of
/// the whole file by more than this tolerance.
inline constexpr double kCompletionTol = 1e-9;

/// One cache-placement problem at base stations: weighted path scenarios,
/// request popularity, a common downlink rate in file sizes per second, and
/// per-station capacities.
struct BsInstance {
  PathScenarioSet scenarios;
  ZipfPopularity popularity;
  double rate = 0.0;
  Capacities caps;
  std::size_t num_bs = 0;
};

/// Fraction of one file collectible along a scenario:
/// min(1, sum_n min(stored_fraction[n], rate * sojourn[n])).
/// Only the total time spent at each station matters, not the visit order.
double downloaded_fraction(std::span<const double> stored_fraction, std::span<const double> sojourn_s,
                           double rate);

/// Probability that a request cannot be completed from the caches.
double failure_probability(const CodedPlacement& placement, const BsInstance& inst);
double failure_probability(const DiscretePlacement& placement, const BsInstance& inst);

/// Expected collected fraction (partial downloads count pro rata). Concave
/// in the placement; the maximization surrogate behind optimize_coded.
double served_fraction_objective(const CodedPlacement& placement, const BsInstance& inst);

/// Euclidean projection onto {0 <= u <= 1, sum(u) <= cap}.
std::vector<double> project_capped_simplex(std::span<const double> v, double cap);

/// Fractional placement minimizing failure probability. The core is
/// projected supergradient ascent on the concave served-fraction relaxation
/// (step 1/sqrt(t), per-station capped-simplex projection, averaged
/// iterates); its best iterates, completion-ladder profiles and the
/// popularity-greedy fill are then polished by exact mass transfers and the
/// candidate with the lowest failure probability is returned (served
/// fraction breaks ties). Deterministic given (instance, seed); the result
/// never does worse than the most-popular-content placement on either
/// metric.
CodedPlacement optimize_coded(const BsInstance& inst, std::size_t iterations = 5000,
                              std::uint64_t seed = 0);

enum class UncodedMode {
  exact,         ///< branch-and-bound, global minimizer; guarded by instance size
  local_search,  ///< steepest-descent file swaps from the MPC start, with restarts
};

/// Whole-file placement minimizing failure probability. Capacities must be
/// integer. Exact mode refuses instances whose per-station choice product
/// exceeds 1e7.
DiscretePlacement optimize_uncoded(const BsInstance& inst, UncodedMode mode, std::uint64_t seed,
                                   std::size_t restarts = 3);

}  // namespace mobcache
