#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace mobcache {

/// Per-user cell association intervals, sorted by (user, enter time).
/// Intervals of one user never overlap.
struct AssociationTrace {
  struct Record {
    std::size_t user = 0;
    std::size_t cell = 0;
    double enter_s = 0.0;
    double exit_s = 0.0;
  };
  std::vector<Record> records;

  std::size_t num_users() const;
  std::size_t num_cells() const;
};

/// Pairwise contact intervals with user_a < user_b, sorted by start time.
/// Overlapping records for the same pair are legal.
struct ContactTrace {
  struct Record {
    std::size_t user_a = 0;
    std::size_t user_b = 0;
    double start_s = 0.0;
    double end_s = 0.0;
  };
  std::vector<Record> records;

  std::size_t num_users() const;
  /// [min start, max end]; (0, 0) for an empty trace.
  std::pair<double, double> span() const;
};

/// Markov model of cell handover: row-stochastic transition matrix, initial
/// cell distribution, and per-cell mean sojourn times in seconds.
struct CellTransitionModel {
  std::size_t num_cells = 0;
  std::vector<std::vector<double>> transition;
  std::vector<double> initial;
  std::vector<double> mean_sojourn_s;
};

/// Symmetric pairwise Poisson contact intensities in contacts per second,
/// zero diagonal.
struct ContactModel {
  std::size_t num_users = 0;
  std::vector<std::vector<double>> rate;
};

/// Weighted user-path scenarios, each reduced to per-cell total sojourn
/// seconds. Weights sum to 1.
struct PathScenarioSet {
  struct Scenario {
    std::vector<double> per_cell_sojourn_s;
    double weight = 0.0;
  };
  std::vector<Scenario> scenarios;

  std::size_t num_cells() const {
    return scenarios.empty() ? 0 : scenarios.front().per_cell_sojourn_s.size();
  }
};

// ---------------------------------------------------------------------------
// Trace ingestion. Format: comma-separated numeric fields, one record per
// line, `#` starts a comment, an optional header line is detected by a
// non-numeric first field. Times are seconds as decimal numbers.
// Malformed lines raise std::runtime_error naming the line number.
// ---------------------------------------------------------------------------

/// Lines `user_id,cell_id,enter_s,exit_s`.
AssociationTrace parse_association_trace(std::istream& in);

/// Lines `user_a,user_b,start_s,end_s`; records are normalized to
/// user_a < user_b and sorted by start time.
ContactTrace parse_contact_trace(std::istream& in);

// ---------------------------------------------------------------------------
// Estimators.
// ---------------------------------------------------------------------------

/// Estimates the cell-transition Markov chain from consecutive records of
/// each user. Cells with no observed departure get a uniform row; cells
/// never visited get mean sojourn 1 s. An empty user_filter means all users.
CellTransitionModel estimate_transition_model(const AssociationTrace& trace,
                                              std::span<const std::size_t> user_filter = {});

/// rate[i][j] = number of contacts between i and j / observation window.
/// num_users == 0 infers the user count from the trace.
ContactModel estimate_contact_model(const ContactTrace& trace, double observation_window_s,
                                    std::size_t num_users = 0);

// ---------------------------------------------------------------------------
// Generators. All are pure functions of their explicit seed.
// ---------------------------------------------------------------------------

/// Draws num_paths independent walks of the chain over [0, horizon]:
/// exponential sojourn with the per-cell mean, then a Markov transition;
/// the final sojourn is truncated at the horizon. Equal scenario weights.
PathScenarioSet sample_paths(const CellTransitionModel& model, double horizon_s,
                             std::size_t num_paths, std::uint64_t seed);

/// Chops each user's record stream into consecutive horizon-length windows
/// anchored at the user's first enter time; every window becomes one
/// scenario with equal weight. Records crossing a window boundary are split.
PathScenarioSet paths_from_trace(const AssociationTrace& trace, double horizon_s);

/// Independent Poisson contact processes per pair over [0, duration].
/// Each contact gets a fixed nominal length, truncated at the duration
/// (the analytic path only consumes contact instants).
ContactTrace sample_contacts(const ContactModel& model, double duration_s, std::uint64_t seed,
                             double contact_length_s = 1.0);

struct WaypointParams {
  double area_width_m = 0.0;
  double area_height_m = 0.0;
  std::size_t cells_x = 0;
  std::size_t cells_y = 0;
  double speed_min_mps = 0.0;
  double speed_max_mps = 0.0;
  double pause_min_s = 0.0;
  double pause_max_s = 0.0;
  double duration_s = 0.0;
  std::size_t num_users = 0;
};

/// Random-waypoint walkers over a regular cells_x-by-cells_y grid: pause,
/// pick a uniform waypoint, move straight at a uniform-drawn speed, repeat.
/// Positions map to the nearest grid cell center; cell crossings become
/// association records. Cell id = row * cells_x + column.
AssociationTrace random_waypoint_trace(const WaypointParams& params, std::uint64_t seed);

/// Synthetic well-mixed chain: uniform off-diagonal transition weights
/// (normalized, zero diagonal), uniform initial distribution, per-cell mean
/// sojourns drawn uniformly from [sojourn_lo_s, sojourn_hi_s].
CellTransitionModel random_transition_model(std::size_t num_cells, double sojourn_lo_s,
                                            double sojourn_hi_s, std::uint64_t seed);

/// Synthetic contact intensities: symmetric, zero diagonal, each pair drawn
/// uniformly from [rate_lo, rate_hi] contacts per second.
ContactModel random_contact_model(std::size_t num_users, double rate_lo, double rate_hi,
                                  std::uint64_t seed);

}  // namespace mobcache
