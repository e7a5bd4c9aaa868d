#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "mobcache/mobility.hpp"
#include "mobcache/model.hpp"

namespace mobcache {

/// Outcome of a replay run next to its closed-form counterpart (absent when
/// the input is a raw trace with no fitted model).
struct ReplayReport {
  std::string metric_name;
  std::optional<double> analytic_value;
  double empirical_value = 0.0;
  std::size_t trials = 0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
};

// ---------------------------------------------------------------------------
// Base-station replay: per trial, draw a path and a request, then walk the
// visit sequence downloading from each station up to the stored fraction and
// rate * visit sojourn. The trial fails when the total stays below one file.
// Trace input treats each user's record stream as one ordered path with equal
// weight; scenario input uses the per-cell totals. The analytic value is the
// closed-form failure probability of the order-collapsed scenario set.
// Per-trial RNG streams derive from (seed, trial), so runs are
// schedule-independent and deterministic.
// ---------------------------------------------------------------------------

ReplayReport simulate_bs_replay(const AssociationTrace& trace, const CodedPlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed);
ReplayReport simulate_bs_replay(const AssociationTrace& trace, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed);
ReplayReport simulate_bs_replay(const PathScenarioSet& paths, const CodedPlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed);
ReplayReport simulate_bs_replay(const PathScenarioSet& paths, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double rate, std::size_t trials,
                                std::uint64_t seed);

// ---------------------------------------------------------------------------
// Terminal replay: per trial, draw a user, a request time and a file; the
// request is served when self-cached or when the first qualifying contact
// lands within the delay threshold. Trace input scans real contact events
// (request times drawn uniformly over the span minus the threshold, which
// must fit); model input draws the first-arrival delay of the superposed
// holder process and reports the closed-form offloading ratio alongside.
// ---------------------------------------------------------------------------

ReplayReport simulate_ut_replay(const ContactTrace& contacts, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double delay_threshold_s,
                                std::size_t trials, std::uint64_t seed);
ReplayReport simulate_ut_replay(const ContactModel& contacts, const DiscretePlacement& placement,
                                const ZipfPopularity& pop, double delay_threshold_s,
                                std::size_t trials, std::uint64_t seed);

}  // namespace mobcache
