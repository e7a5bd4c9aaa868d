#include "mobcache/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>

#include "mobcache/rng.hpp"

namespace mobcache {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_fail(std::size_t line_no, const std::string& what) {
  throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

bool try_parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc{} && ptr == last;
}

double parse_double(std::string_view field, std::size_t line_no) {
  double v = 0.0;
  if (!try_parse_double(field, v))
    parse_fail(line_no, "invalid number '" + std::string(trim(field)) + "'");
  return v;
}

std::size_t parse_id(std::string_view field, std::size_t line_no) {
  const double v = parse_double(field, line_no);
  if (v < 0.0 || std::floor(v) != v)
    parse_fail(line_no, "id must be a nonnegative integer, got '" + std::string(trim(field)) + "'");
  return static_cast<std::size_t>(v);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

// Streams data lines to `handle(fields, line_no)`, skipping comments, blank
// lines and one optional header (first data line with a non-numeric field).
template <typename Handler>
void for_each_data_line(std::istream& in, std::size_t expected_fields, Handler&& handle) {
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body{line};
    if (const auto hash = body.find('#'); hash != std::string_view::npos)
      body = body.substr(0, hash);
    body = trim(body);
    if (body.empty()) continue;

    const auto fields = split_fields(body);
    if (!seen_data) {
      double probe = 0.0;
      if (!try_parse_double(fields.front(), probe)) {
        seen_data = true;  // header line, consumed
        continue;
      }
    }
    seen_data = true;
    if (fields.size() != expected_fields)
      parse_fail(line_no, "expected " + std::to_string(expected_fields) + " fields, got " +
                              std::to_string(fields.size()));
    handle(fields, line_no);
  }
}

}  // namespace

std::size_t AssociationTrace::num_users() const {
  std::size_t m = 0;
  for (const auto& r : records) m = std::max(m, r.user + 1);
  return m;
}

std::size_t AssociationTrace::num_cells() const {
  std::size_t m = 0;
  for (const auto& r : records) m = std::max(m, r.cell + 1);
  return m;
}

std::size_t ContactTrace::num_users() const {
  std::size_t m = 0;
  for (const auto& r : records) m = std::max(m, r.user_b + 1);
  return m;
}

std::pair<double, double> ContactTrace::span() const {
  if (records.empty()) return {0.0, 0.0};
  double lo = records.front().start_s;
  double hi = records.front().end_s;
  for (const auto& r : records) {
    lo = std::min(lo, r.start_s);
    hi = std::max(hi, r.end_s);
  }
  return {lo, hi};
}

AssociationTrace parse_association_trace(std::istream& in) {
  AssociationTrace trace;
  std::vector<std::size_t> line_of;
  for_each_data_line(in, 4, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    AssociationTrace::Record rec;
    rec.user = parse_id(f[0], line_no);
    rec.cell = parse_id(f[1], line_no);
    rec.enter_s = parse_double(f[2], line_no);
    rec.exit_s = parse_double(f[3], line_no);
    if (rec.exit_s <= rec.enter_s) parse_fail(line_no, "exit before enter");
    trace.records.push_back(rec);
    line_of.push_back(line_no);
  });

  std::vector<std::size_t> order(trace.records.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ra = trace.records[a];
    const auto& rb = trace.records[b];
    if (ra.user != rb.user) return ra.user < rb.user;
    return ra.enter_s < rb.enter_s;
  });

  AssociationTrace sorted;
  sorted.records.reserve(trace.records.size());
  for (std::size_t i : order) sorted.records.push_back(trace.records[i]);
  for (std::size_t i = 0; i + 1 < sorted.records.size(); ++i) {
    const auto& a = sorted.records[i];
    const auto& b = sorted.records[i + 1];
    if (a.user == b.user && b.enter_s < a.exit_s)
      parse_fail(line_of[order[i + 1]],
                 "overlapping records for user " + std::to_string(a.user));
  }
  return sorted;
}

ContactTrace parse_contact_trace(std::istream& in) {
  ContactTrace trace;
  for_each_data_line(in, 4, [&](const std::vector<std::string_view>& f, std::size_t line_no) {
    ContactTrace::Record rec;
    rec.user_a = parse_id(f[0], line_no);
    rec.user_b = parse_id(f[1], line_no);
    rec.start_s = parse_double(f[2], line_no);
    rec.end_s = parse_double(f[3], line_no);
    if (rec.user_a == rec.user_b) parse_fail(line_no, "self-contact");
    if (rec.end_s <= rec.start_s) parse_fail(line_no, "contact ends before it starts");
    if (rec.user_a > rec.user_b) std::swap(rec.user_a, rec.user_b);
    trace.records.push_back(rec);
  });
  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const ContactTrace::Record& a, const ContactTrace::Record& b) {
                     if (a.start_s != b.start_s) return a.start_s < b.start_s;
                     if (a.user_a != b.user_a) return a.user_a < b.user_a;
                     return a.user_b < b.user_b;
                   });
  return trace;
}

CellTransitionModel estimate_transition_model(const AssociationTrace& trace,
                                              std::span<const std::size_t> user_filter) {
  std::unordered_set<std::size_t> keep(user_filter.begin(), user_filter.end());
  std::vector<const AssociationTrace::Record*> recs;
  recs.reserve(trace.records.size());
  for (const auto& r : trace.records)
    if (keep.empty() || keep.count(r.user)) recs.push_back(&r);
  if (recs.empty())
    throw std::invalid_argument("estimate_transition_model: empty trace");

  std::size_t num_cells = 0;
  for (const auto* r : recs) num_cells = std::max(num_cells, r->cell + 1);

  CellTransitionModel model;
  model.num_cells = num_cells;
  model.transition.assign(num_cells, std::vector<double>(num_cells, 0.0));
  model.initial.assign(num_cells, 0.0);
  model.mean_sojourn_s.assign(num_cells, 0.0);

  std::vector<double> departures(num_cells, 0.0);
  std::vector<double> visit_time(num_cells, 0.0);
  std::vector<std::size_t> visit_count(num_cells, 0);
  std::size_t num_walkers = 0;

  // Records are sorted by (user, enter); consecutive records of one user
  // form a transition.
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto& r = *recs[i];
    visit_time[r.cell] += r.exit_s - r.enter_s;
    visit_count[r.cell] += 1;
    if (i == 0 || recs[i - 1]->user != r.user) {
      model.initial[r.cell] += 1.0;
      ++num_walkers;
    }
    if (i + 1 < recs.size() && recs[i + 1]->user == r.user) {
      model.transition[r.cell][recs[i + 1]->cell] += 1.0;
      departures[r.cell] += 1.0;
    }
  }

  for (std::size_t a = 0; a < num_cells; ++a) {
    if (departures[a] > 0.0) {
      for (double& p : model.transition[a]) p /= departures[a];
    } else {
      // No observed departure: uniform smoothed row keeps the chain stochastic.
      std::fill(model.transition[a].begin(), model.transition[a].end(),
                1.0 / static_cast<double>(num_cells));
    }
    model.mean_sojourn_s[a] =
        visit_count[a] > 0 ? visit_time[a] / static_cast<double>(visit_count[a]) : 1.0;
  }
  for (double& p : model.initial) p /= static_cast<double>(num_walkers);
  return model;
}

ContactModel estimate_contact_model(const ContactTrace& trace, double observation_window_s,
                                    std::size_t num_users) {
  if (!(observation_window_s > 0.0))
    throw std::invalid_argument("estimate_contact_model: window must be positive");
  if (!trace.records.empty()) {
    const auto [lo, hi] = trace.span();
    if (observation_window_s + 1e-9 < hi - lo)
      throw std::invalid_argument("estimate_contact_model: window shorter than trace span");
  }
  std::size_t k = trace.num_users();
  if (num_users > 0) {
    if (num_users < k)
      throw std::invalid_argument("estimate_contact_model: num_users below max trace user id");
    k = num_users;
  }

  ContactModel model;
  model.num_users = k;
  model.rate.assign(k, std::vector<double>(k, 0.0));
  for (const auto& r : trace.records) {
    model.rate[r.user_a][r.user_b] += 1.0;
    model.rate[r.user_b][r.user_a] += 1.0;
  }
  for (auto& row : model.rate)
    for (double& v : row) v /= observation_window_s;
  return model;
}

PathScenarioSet sample_paths(const CellTransitionModel& model, double horizon_s,
                             std::size_t num_paths, std::uint64_t seed) {
  if (model.num_cells == 0) throw std::invalid_argument("sample_paths: empty model");
  if (!(horizon_s > 0.0)) throw std::invalid_argument("sample_paths: horizon must be positive");
  if (num_paths == 0) throw std::invalid_argument("sample_paths: need at least one path");

  PathScenarioSet set;
  set.scenarios.resize(num_paths);
  for (std::size_t p = 0; p < num_paths; ++p) {
    auto rng = make_rng(mix_seed(seed, p));
    auto& scenario = set.scenarios[p];
    scenario.per_cell_sojourn_s.assign(model.num_cells, 0.0);
    scenario.weight = 1.0 / static_cast<double>(num_paths);

    std::size_t cell = sample_from_pmf(model.initial, rng);
    double t = 0.0;
    while (t < horizon_s) {
      const double sojourn = exponential(rng, model.mean_sojourn_s[cell]);
      scenario.per_cell_sojourn_s[cell] += std::min(sojourn, horizon_s - t);
      t += sojourn;
      if (t < horizon_s) cell = sample_from_pmf(model.transition[cell], rng);
    }
  }
  return set;
}

PathScenarioSet paths_from_trace(const AssociationTrace& trace, double horizon_s) {
  if (trace.records.empty()) throw std::invalid_argument("paths_from_trace: empty trace");
  if (!(horizon_s > 0.0))
    throw std::invalid_argument("paths_from_trace: horizon must be positive");

  const std::size_t num_cells = trace.num_cells();
  PathScenarioSet set;

  std::size_t i = 0;
  while (i < trace.records.size()) {
    std::size_t j = i;
    while (j < trace.records.size() && trace.records[j].user == trace.records[i].user) ++j;

    const double t0 = trace.records[i].enter_s;
    const double t_end = trace.records[j - 1].exit_s;
    const auto num_windows =
        static_cast<std::size_t>(std::ceil((t_end - t0) / horizon_s - 1e-12));
    const std::size_t base = set.scenarios.size();
    set.scenarios.resize(base + std::max<std::size_t>(num_windows, 1));
    for (std::size_t w = base; w < set.scenarios.size(); ++w)
      set.scenarios[w].per_cell_sojourn_s.assign(num_cells, 0.0);

    for (std::size_t r = i; r < j; ++r) {
      const auto& rec = trace.records[r];
      // Split the record across the horizon windows it intersects.
      auto w = static_cast<std::size_t>((rec.enter_s - t0) / horizon_s);
      double lo = rec.enter_s;
      while (lo < rec.exit_s) {
        const double window_end = t0 + static_cast<double>(w + 1) * horizon_s;
        const double hi = std::min(rec.exit_s, window_end);
        if (hi > lo) {
          const std::size_t slot = base + std::min(w, set.scenarios.size() - base - 1);
          set.scenarios[slot].per_cell_sojourn_s[rec.cell] += hi - lo;
        }
        lo = std::max(hi, window_end);
        ++w;
      }
    }
    i = j;
  }

  const double weight = 1.0 / static_cast<double>(set.scenarios.size());
  for (auto& s : set.scenarios) s.weight = weight;
  return set;
}

ContactTrace sample_contacts(const ContactModel& model, double duration_s, std::uint64_t seed,
                             double contact_length_s) {
  if (!(duration_s > 0.0))
    throw std::invalid_argument("sample_contacts: duration must be positive");
  ContactTrace trace;
  for (std::size_t i = 0; i < model.num_users; ++i) {
    for (std::size_t j = i + 1; j < model.num_users; ++j) {
      const double rate = model.rate[i][j];
      if (!(rate > 0.0)) continue;
      auto rng = make_rng(mix_seed(seed, i * model.num_users + j));
      double t = exponential(rng, 1.0 / rate);
      while (t < duration_s) {
        trace.records.push_back(
            {i, j, t, std::min(t + contact_length_s, duration_s)});
        t += exponential(rng, 1.0 / rate);
      }
    }
  }
  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const ContactTrace::Record& a, const ContactTrace::Record& b) {
                     if (a.start_s != b.start_s) return a.start_s < b.start_s;
                     if (a.user_a != b.user_a) return a.user_a < b.user_a;
                     return a.user_b < b.user_b;
                   });
  return trace;
}

namespace {

struct CellGrid {
  double tile_w, tile_h;
  std::size_t nx, ny;

  std::size_t cell_at(double x, double y) const {
    auto ix = static_cast<std::size_t>(std::clamp(x / tile_w, 0.0, static_cast<double>(nx) - 0.5));
    auto iy = static_cast<std::size_t>(std::clamp(y / tile_h, 0.0, static_cast<double>(ny) - 0.5));
    ix = std::min(ix, nx - 1);
    iy = std::min(iy, ny - 1);
    return iy * nx + ix;
  }
};

}  // namespace

AssociationTrace random_waypoint_trace(const WaypointParams& p, std::uint64_t seed) {
  if (!(p.area_width_m > 0.0) || !(p.area_height_m > 0.0))
    throw std::invalid_argument("random_waypoint_trace: degenerate area");
  if (p.cells_x == 0 || p.cells_y == 0)
    throw std::invalid_argument("random_waypoint_trace: zero cells");
  if (!(p.speed_min_mps > 0.0) || p.speed_max_mps < p.speed_min_mps)
    throw std::invalid_argument("random_waypoint_trace: speed range needs a positive minimum");
  if (p.pause_min_s < 0.0 || p.pause_max_s < p.pause_min_s)
    throw std::invalid_argument("random_waypoint_trace: bad pause range");
  if (!(p.duration_s > 0.0) || p.num_users == 0)
    throw std::invalid_argument("random_waypoint_trace: need positive duration and users");

  const CellGrid grid{p.area_width_m / static_cast<double>(p.cells_x),
                      p.area_height_m / static_cast<double>(p.cells_y), p.cells_x, p.cells_y};

  AssociationTrace trace;
  for (std::size_t u = 0; u < p.num_users; ++u) {
    auto rng = make_rng(mix_seed(seed, u));
    double x = uniform_range(rng, 0.0, p.area_width_m);
    double y = uniform_range(rng, 0.0, p.area_height_m);
    double t = 0.0;
    std::size_t cur_cell = grid.cell_at(x, y);
    double cell_start = 0.0;

    auto close_record = [&](double until) {
      if (until > cell_start)
        trace.records.push_back({u, cur_cell, cell_start, until});
    };
    auto enter_cell = [&](std::size_t cell, double at) {
      if (cell == cur_cell) return;
      close_record(at);
      cur_cell = cell;
      cell_start = at;
    };

    // Pause first so a pause range dwarfing the duration yields one record.
    t += uniform_range(rng, p.pause_min_s, p.pause_max_s);
    while (t < p.duration_s) {
      const double wx = uniform_range(rng, 0.0, p.area_width_m);
      const double wy = uniform_range(rng, 0.0, p.area_height_m);
      const double speed = uniform_range(rng, p.speed_min_mps, p.speed_max_mps);
      const double dist = std::hypot(wx - x, wy - y);
      const double travel = dist / speed;

      if (travel > 0.0) {
        // Parametric boundary crossings along the straight segment.
        std::vector<double> cuts;
        auto add_axis_cuts = [&](double a0, double a1, double tile) {
          if (a0 == a1) return;
          const double lo = std::min(a0, a1);
          const double hi = std::max(a0, a1);
          for (auto k = static_cast<long long>(std::ceil(lo / tile)); k * tile < hi; ++k) {
            const double s = (k * tile - a0) / (a1 - a0);
            if (s > 0.0 && s < 1.0) cuts.push_back(s);
          }
        };
        add_axis_cuts(x, wx, grid.tile_w);
        add_axis_cuts(y, wy, grid.tile_h);
        cuts.push_back(1.0);
        std::sort(cuts.begin(), cuts.end());

        double prev = 0.0;
        for (double s : cuts) {
          if (s - prev < 1e-15) continue;
          const double mid = 0.5 * (prev + s);
          enter_cell(grid.cell_at(x + mid * (wx - x), y + mid * (wy - y)), t + prev * travel);
          prev = s;
          if (t + s * travel >= p.duration_s) break;
        }
      }
      t += travel;
      x = wx;
      y = wy;
      t += uniform_range(rng, p.pause_min_s, p.pause_max_s);
    }
    close_record(p.duration_s);
  }

  std::stable_sort(trace.records.begin(), trace.records.end(),
                   [](const AssociationTrace::Record& a, const AssociationTrace::Record& b) {
                     if (a.user != b.user) return a.user < b.user;
                     return a.enter_s < b.enter_s;
                   });
  return trace;
}

CellTransitionModel random_transition_model(std::size_t num_cells, double sojourn_lo_s,
                                            double sojourn_hi_s, std::uint64_t seed) {
  if (num_cells == 0) throw std::invalid_argument("random_transition_model: zero cells");
  if (!(sojourn_lo_s > 0.0) || sojourn_hi_s < sojourn_lo_s)
    throw std::invalid_argument("random_transition_model: bad sojourn range");

  auto rng = make_rng(mix_seed(seed, 0x7ca11));
  CellTransitionModel model;
  model.num_cells = num_cells;
  model.initial.assign(num_cells, 1.0 / static_cast<double>(num_cells));
  model.transition.assign(num_cells, std::vector<double>(num_cells, 0.0));
  model.mean_sojourn_s.resize(num_cells);

  for (std::size_t a = 0; a < num_cells; ++a) {
    model.mean_sojourn_s[a] = uniform_range(rng, sojourn_lo_s, sojourn_hi_s);
    if (num_cells == 1) {
      model.transition[a][a] = 1.0;
      continue;
    }
    double norm = 0.0;
    for (std::size_t b = 0; b < num_cells; ++b) {
      if (b == a) continue;
      // Weights bounded away from zero keep the chain well mixed.
      model.transition[a][b] = uniform_range(rng, 0.2, 1.0);
      norm += model.transition[a][b];
    }
    for (double& v : model.transition[a]) v /= norm;
  }
  return model;
}

ContactModel random_contact_model(std::size_t num_users, double rate_lo, double rate_hi,
                                  std::uint64_t seed) {
  if (num_users == 0) throw std::invalid_argument("random_contact_model: zero users");
  if (rate_lo < 0.0 || rate_hi < rate_lo)
    throw std::invalid_argument("random_contact_model: bad rate range");

  auto rng = make_rng(mix_seed(seed, 0xc0ac7));
  ContactModel model;
  model.num_users = num_users;
  model.rate.assign(num_users, std::vector<double>(num_users, 0.0));
  for (std::size_t i = 0; i < num_users; ++i)
    for (std::size_t j = i + 1; j < num_users; ++j)
      model.rate[i][j] = model.rate[j][i] = uniform_range(rng, rate_lo, rate_hi);
  return model;
}

}  // namespace mobcache
