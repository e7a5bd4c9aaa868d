#include "mobcache/bs_place.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mobcache/rng.hpp"

namespace mobcache {

namespace {

void check_instance(const BsInstance& inst) {
  if (inst.num_bs == 0) throw std::invalid_argument("BsInstance: no base stations");
  if (!(inst.rate > 0.0)) throw std::invalid_argument("BsInstance: rate must be positive");
  if (inst.caps.per_node.size() != inst.num_bs)
    throw std::invalid_argument("BsInstance: capacity vector length mismatch");
  for (const auto& s : inst.scenarios.scenarios)
    if (s.per_cell_sojourn_s.size() != inst.num_bs)
      throw std::invalid_argument("BsInstance: scenario sojourn length mismatch");
}

void check_dims(std::size_t nodes, std::size_t files, const BsInstance& inst) {
  if (nodes != inst.num_bs || files != inst.popularity.num_files)
    throw std::invalid_argument("placement dimensions do not match instance");
}

using Matrix = std::vector<std::vector<double>>;

Matrix to_matrix(const DiscretePlacement& placement) {
  Matrix x(placement.num_nodes(), std::vector<double>(placement.num_files(), 0.0));
  for (std::size_t n = 0; n < placement.num_nodes(); ++n)
    for (std::size_t f = 0; f < placement.num_files(); ++f)
      x[n][f] = placement.stored[n][f] ? 1.0 : 0.0;
  return x;
}

double failure_impl(const Matrix& x, const BsInstance& inst) {
  const std::size_t num_files = inst.popularity.num_files;
  double failure = 0.0;
  for (const auto& s : inst.scenarios.scenarios) {
    for (std::size_t f = 0; f < num_files; ++f) {
      double total = 0.0;
      for (std::size_t n = 0; n < inst.num_bs; ++n)
        total += std::min(x[n][f], inst.rate * s.per_cell_sojourn_s[n]);
      if (total < 1.0 - kCompletionTol) failure += s.weight * inst.popularity.pmf[f];
    }
  }
  return failure;
}

double served_impl(const Matrix& x, const BsInstance& inst) {
  const std::size_t num_files = inst.popularity.num_files;
  double served = 0.0;
  for (const auto& s : inst.scenarios.scenarios) {
    for (std::size_t f = 0; f < num_files; ++f) {
      double total = 0.0;
      for (std::size_t n = 0; n < inst.num_bs; ++n)
        total += std::min(x[n][f], inst.rate * s.per_cell_sojourn_s[n]);
      served += s.weight * inst.popularity.pmf[f] * std::min(1.0, total);
    }
  }
  return served;
}

std::vector<std::size_t> integer_caps(const BsInstance& inst) {
  std::vector<std::size_t> caps(inst.num_bs);
  for (std::size_t n = 0; n < inst.num_bs; ++n) {
    const double c = inst.caps.per_node[n];
    if (c < 0.0 || std::floor(c) != c)
      throw std::invalid_argument("uncoded placement needs integer capacities");
    caps[n] = std::min<std::size_t>(static_cast<std::size_t>(c), inst.popularity.num_files);
  }
  return caps;
}

}  // namespace

double downloaded_fraction(std::span<const double> stored_fraction,
                           std::span<const double> sojourn_s, double rate) {
  if (stored_fraction.size() != sojourn_s.size())
    throw std::invalid_argument("downloaded_fraction: length mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < stored_fraction.size(); ++n)
    total += std::min(stored_fraction[n], rate * sojourn_s[n]);
  return std::min(1.0, total);
}

double failure_probability(const CodedPlacement& placement, const BsInstance& inst) {
  check_instance(inst);
  check_dims(placement.num_nodes(), placement.num_files(), inst);
  return failure_impl(placement.x, inst);
}

double failure_probability(const DiscretePlacement& placement, const BsInstance& inst) {
  check_instance(inst);
  check_dims(placement.num_nodes(), placement.num_files(), inst);
  return failure_impl(to_matrix(placement), inst);
}

double served_fraction_objective(const CodedPlacement& placement, const BsInstance& inst) {
  check_instance(inst);
  check_dims(placement.num_nodes(), placement.num_files(), inst);
  return served_impl(placement.x, inst);
}

std::vector<double> project_capped_simplex(std::span<const double> v, double cap) {
  if (cap < 0.0) throw std::invalid_argument("project_capped_simplex: negative cap");

  std::vector<double> u(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::clamp(v[i], 0.0, 1.0);
  const double boxed_sum = std::accumulate(u.begin(), u.end(), 0.0);
  if (boxed_sum <= cap) return u;

  // The sum constraint is active: u_i = clamp(v_i - theta, 0, 1) with theta
  // chosen so the coordinates sum to cap. Bisection brackets theta, then one
  // linear solve on the identified active set makes the sum exact.
  auto shifted_sum = [&](double theta) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += std::clamp(v[i] - theta, 0.0, 1.0);
    return s;
  };

  double lo = 0.0;
  double hi = *std::max_element(v.begin(), v.end());
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shifted_sum(mid) > cap)
      lo = mid;
    else
      hi = mid;
  }

  double theta = 0.5 * (lo + hi);
  double fixed = 0.0;
  std::size_t free_count = 0;
  double free_sum = 0.0;
  for (double vi : v) {
    const double ui = vi - theta;
    if (ui >= 1.0) {
      fixed += 1.0;
    } else if (ui > 0.0) {
      ++free_count;
      free_sum += vi;
    }
  }
  if (free_count > 0) theta = (free_sum + fixed - cap) / static_cast<double>(free_count);

  for (std::size_t i = 0; i < v.size(); ++i) u[i] = std::clamp(v[i] - theta, 0.0, 1.0);
  return u;
}

namespace {

// Exact first-improvement transfer ascent: move mass between two files of
// one station, with the 1-D optimum evaluated at its breakpoints (cap kinks
// and completion kinks). Every applied move strictly increases the served
// fraction, and coordinates end up parked exactly on completion boundaries
// instead of drifting around them, which is what the thresholded failure
// metric rewards.
void transfer_polish(Matrix& x, const BsInstance& inst, std::size_t max_passes) {
  const std::size_t num_bs = inst.num_bs;
  const std::size_t num_files = inst.popularity.num_files;
  const auto& scenarios = inst.scenarios.scenarios;
  const std::size_t num_scenarios = scenarios.size();

  std::vector<std::vector<double>> cap(num_scenarios, std::vector<double>(num_bs));
  for (std::size_t s = 0; s < num_scenarios; ++s)
    for (std::size_t n = 0; n < num_bs; ++n)
      cap[s][n] = inst.rate * scenarios[s].per_cell_sojourn_s[n];

  // R[s][f] = uncapped collected fraction of file f in scenario s
  std::vector<std::vector<double>> collected(num_scenarios, std::vector<double>(num_files, 0.0));
  for (std::size_t s = 0; s < num_scenarios; ++s)
    for (std::size_t f = 0; f < num_files; ++f)
      for (std::size_t n = 0; n < num_bs; ++n)
        collected[s][f] += std::min(x[n][f], cap[s][n]);

  // served value and thresholded failure mass of column f with station n's
  // entry replaced by xv
  auto column_score = [&](std::size_t f, std::size_t n, double xv) {
    double value = 0.0;
    double failed = 0.0;
    for (std::size_t s = 0; s < num_scenarios; ++s) {
      const double r = collected[s][f] - std::min(x[n][f], cap[s][n]) + std::min(xv, cap[s][n]);
      value += scenarios[s].weight * std::min(1.0, r);
      if (r < 1.0 - kCompletionTol) failed += scenarios[s].weight;
    }
    return std::pair{inst.popularity.pmf[f] * value, inst.popularity.pmf[f] * failed};
  };

  std::vector<double> deltas;
  for (std::size_t pass = 0; pass < max_passes; ++pass) {
    if (pass > 0) {  // refresh the incrementally maintained sums
      for (std::size_t s = 0; s < num_scenarios; ++s)
        for (std::size_t f = 0; f < num_files; ++f) {
          collected[s][f] = 0.0;
          for (std::size_t n = 0; n < num_bs; ++n)
            collected[s][f] += std::min(x[n][f], cap[s][n]);
        }
    }
    bool improved = false;
    for (std::size_t n = 0; n < num_bs; ++n) {
      for (std::size_t to = 0; to < num_files; ++to) {
        for (std::size_t from = 0; from < num_files; ++from) {
          if (from == to || x[n][from] <= 0.0 || x[n][to] >= 1.0) continue;
          const double max_delta = std::min(x[n][from], 1.0 - x[n][to]);

          deltas.clear();
          deltas.push_back(max_delta);
          for (std::size_t s = 0; s < num_scenarios; ++s) {
            const double c = cap[s][n];
            // receiver cap kink
            if (c > x[n][to] && c - x[n][to] < max_delta) deltas.push_back(c - x[n][to]);
            // receiver completion kink (only meaningful below the cap kink)
            const double need = 1.0 - collected[s][to];
            if (need > 0.0 && need < max_delta && x[n][to] + need <= c)
              deltas.push_back(need);
            // donor kinks: where the donor stops paying
            if (x[n][from] > c && x[n][from] - c < max_delta) deltas.push_back(x[n][from] - c);
            const double surplus = collected[s][from] - 1.0;
            if (surplus > 0.0 && surplus < max_delta && x[n][from] - surplus <= c)
              deltas.push_back(surplus);
          }

          const auto [base_to_v, base_to_f] = column_score(to, n, x[n][to]);
          const auto [base_from_v, base_from_f] = column_score(from, n, x[n][from]);
          const double base = base_to_v + base_from_v;
          const double base_fail = base_to_f + base_from_f;
          // best strict ascent move; failing that, a move along the flat
          // part of the objective that strictly lowers the failure mass
          double best_gain = 1e-12;
          double best_delta = 0.0;
          double flat_delta = 0.0;
          double flat_fail_drop = 1e-12;
          for (double d : deltas) {
            const auto [to_v, to_f] = column_score(to, n, x[n][to] + d);
            const auto [from_v, from_f] = column_score(from, n, x[n][from] - d);
            const double gain = to_v + from_v - base;
            if (gain > best_gain) {
              best_gain = gain;
              best_delta = d;
            } else if (gain > -1e-12 && base_fail - (to_f + from_f) > flat_fail_drop) {
              flat_fail_drop = base_fail - (to_f + from_f);
              flat_delta = d;
            }
          }
          if (best_delta == 0.0 && flat_delta > 0.0) best_delta = flat_delta;
          if (best_delta > 0.0) {
            for (std::size_t s = 0; s < num_scenarios; ++s) {
              const double c = cap[s][n];
              collected[s][to] += std::min(x[n][to] + best_delta, c) - std::min(x[n][to], c);
              collected[s][from] += std::min(x[n][from] - best_delta, c) - std::min(x[n][from], c);
            }
            x[n][to] += best_delta;
            x[n][from] -= best_delta;
            improved = true;
          }
        }
      }
    }
    if (!improved) break;
  }
}

}  // namespace

CodedPlacement optimize_coded(const BsInstance& inst, std::size_t iterations, std::uint64_t seed) {
  check_instance(inst);
  const std::size_t num_bs = inst.num_bs;
  const std::size_t num_files = inst.popularity.num_files;

  auto project_rows = [&](Matrix& x) {
    for (std::size_t n = 0; n < num_bs; ++n)
      x[n] = project_capped_simplex(x[n], inst.caps.per_node[n]);
  };

  auto rng = make_rng(mix_seed(seed, 0xc0ded));
  Matrix x(num_bs, std::vector<double>(num_files));
  for (auto& row : x)
    for (double& xi : row) xi = uniform01(rng);
  project_rows(x);

  // popularity-greedy fractional fill: warm-start candidate and the
  // fractional counterpart of the most-popular-content placement
  Matrix greedy_fill(num_bs, std::vector<double>(num_files, 0.0));
  for (std::size_t n = 0; n < num_bs; ++n) {
    double remaining = inst.caps.per_node[n];
    for (std::size_t f = 0; f < num_files && remaining > 0.0; ++f) {
      greedy_fill[n][f] = std::min(1.0, remaining);
      remaining -= greedy_fill[n][f];
    }
  }

  Matrix avg = x;
  Matrix tail = x;  // restarted at doubling boundaries; converges faster
  std::size_t tail_len = 1;
  Matrix grad(num_bs, std::vector<double>(num_files));
  Matrix best_x = greedy_fill;
  double best_obj = served_impl(greedy_fill, inst);

  const double alpha0 = 1.0;
  for (std::size_t t = 1; t <= iterations; ++t) {
    for (auto& row : grad) std::fill(row.begin(), row.end(), 0.0);
    double obj = 0.0;
    for (const auto& s : inst.scenarios.scenarios) {
      for (std::size_t f = 0; f < num_files; ++f) {
        double total = 0.0;
        for (std::size_t n = 0; n < num_bs; ++n)
          total += std::min(x[n][f], inst.rate * s.per_cell_sojourn_s[n]);
        const double mass = s.weight * inst.popularity.pmf[f];
        if (total < 1.0) {
          obj += mass * total;
          for (std::size_t n = 0; n < num_bs; ++n)
            if (x[n][f] < inst.rate * s.per_cell_sojourn_s[n]) grad[n][f] += mass;
        } else {
          obj += mass;
        }
      }
    }
    if (obj > best_obj) {
      best_obj = obj;
      best_x = x;
    }

    const double step = alpha0 / std::sqrt(static_cast<double>(t));
    for (std::size_t n = 0; n < num_bs; ++n)
      for (std::size_t f = 0; f < num_files; ++f) x[n][f] += step * grad[n][f];
    project_rows(x);

    const double blend = 1.0 / static_cast<double>(t + 1);
    const double tail_blend = 1.0 / static_cast<double>(tail_len + 1);
    for (std::size_t n = 0; n < num_bs; ++n)
      for (std::size_t f = 0; f < num_files; ++f) {
        avg[n][f] += blend * (x[n][f] - avg[n][f]);
        tail[n][f] += tail_blend * (x[n][f] - tail[n][f]);
      }
    ++tail_len;

    if (t % 64 == 0 || t == iterations) {
      for (const Matrix* candidate : {&avg, &tail}) {
        const double obj_c = served_impl(*candidate, inst);
        if (obj_c > best_obj) {
          best_obj = obj_c;
          best_x = *candidate;
        }
      }
    }
    if ((t & (t - 1)) == 0) {  // power of two: restart the tail average
      tail = x;
      tail_len = 1;
    }
  }

  // Candidate pool, judged by failure probability first and served fraction
  // as the tie-break. The surrogate ascent explores the concave relaxation;
  // completion-ladder profiles and the transfer polish supply placements
  // that convert the same capacity into fully assembled files.
  Matrix chosen;
  double chosen_failure = 2.0;
  double chosen_served = -1.0;
  auto consider = [&](Matrix candidate, std::size_t polish_passes) {
    if (polish_passes > 0) transfer_polish(candidate, inst, polish_passes);
    const double failure = failure_impl(candidate, inst);
    const double served = served_impl(candidate, inst);
    if (failure < chosen_failure - 1e-12 ||
        (failure < chosen_failure + 1e-12 && served > chosen_served + 1e-12)) {
      chosen = std::move(candidate);
      chosen_failure = failure;
      chosen_served = served;
    }
  };

  // ladder profiles: every station spreads its budget over its top
  // floor(k * cap) files at fraction 1/k, completing the head of the
  // library on any path that collects k shares
  auto ladder = [&](std::size_t k) {
    Matrix m(num_bs, std::vector<double>(num_files, 0.0));
    for (std::size_t n = 0; n < num_bs; ++n) {
      double remaining = inst.caps.per_node[n];
      const double share = 1.0 / static_cast<double>(k);
      for (std::size_t f = 0; f < num_files && remaining > 1e-12; ++f) {
        m[n][f] = std::min({1.0, share, remaining});
        remaining -= m[n][f];
      }
    }
    return m;
  };

  std::size_t best_ladder = 1;
  double best_ladder_failure = 2.0;
  for (std::size_t k = 1; k <= 2 * num_bs; ++k) {
    Matrix m = ladder(k);
    const double failure = failure_impl(m, inst);
    consider(std::move(m), 0);
    if (failure < best_ladder_failure) {
      best_ladder_failure = failure;
      best_ladder = k;
    }
  }
  consider(ladder(best_ladder), 24);
  consider(std::move(greedy_fill), 24);
  consider(std::move(best_x), 24);

  // toy instances: multi-start grid over the first file's allocation, with
  // the rest of each budget on the second file; the polish snaps every
  // start onto its local completion corner
  if (num_bs <= 2 && num_files <= 2 && inst.scenarios.scenarios.size() <= 8) {
    const std::size_t levels = 16;
    std::vector<std::size_t> idx(num_bs, 0);
    while (true) {
      Matrix m(num_bs, std::vector<double>(num_files, 0.0));
      for (std::size_t n = 0; n < num_bs; ++n) {
        const double hi = std::min(1.0, inst.caps.per_node[n]);
        m[n][0] = hi * static_cast<double>(idx[n]) / static_cast<double>(levels);
        if (num_files > 1) m[n][1] = std::min(1.0, inst.caps.per_node[n] - m[n][0]);
      }
      consider(std::move(m), 6);
      std::size_t carry = 0;
      while (carry < num_bs && ++idx[carry] > levels) idx[carry++] = 0;
      if (carry == num_bs) break;
    }
  }

  CodedPlacement placement;
  placement.x = std::move(chosen);
  return placement;
}

namespace {

// ---- exact branch-and-bound over per-station file subsets ----

struct BranchState {
  const BsInstance* inst;
  std::vector<std::vector<std::size_t>> choices;  // per station, flattened subsets
  std::size_t subset_size(std::size_t n) const { return sizes[n]; }
  std::vector<std::size_t> sizes;
  Matrix x;  // rows below the frontier are decided, rows above are all-ones
  double best_failure = std::numeric_limits<double>::infinity();
  Matrix best_x;
};

void enumerate_subsets(std::size_t num_files, std::size_t k,
                       std::vector<std::size_t>& flat) {
  std::vector<std::size_t> comb(k);
  std::iota(comb.begin(), comb.end(), std::size_t{0});
  if (k == 0) return;
  while (true) {
    flat.insert(flat.end(), comb.begin(), comb.end());
    std::size_t i = k;
    while (i > 0 && comb[i - 1] == num_files - k + i - 1) --i;
    if (i == 0) break;
    ++comb[i - 1];
    for (std::size_t j = i; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
}

void branch(BranchState& st, std::size_t depth) {
  const BsInstance& inst = *st.inst;
  if (depth == inst.num_bs) {
    const double failure = failure_impl(st.x, inst);
    if (failure < st.best_failure) {
      st.best_failure = failure;
      st.best_x = st.x;
    }
    return;
  }

  // Rows at and above `depth` hold a full cache, so this failure value is a
  // lower bound for every completion (storage only shrinks from here).
  if (failure_impl(st.x, inst) >= st.best_failure) return;

  const std::size_t k = st.subset_size(depth);
  auto& row = st.x[depth];
  if (k == 0) {
    std::fill(row.begin(), row.end(), 0.0);
    branch(st, depth + 1);
    std::fill(row.begin(), row.end(), 1.0);
    return;
  }
  const auto& flat = st.choices[depth];
  for (std::size_t off = 0; off < flat.size(); off += k) {
    std::fill(row.begin(), row.end(), 0.0);
    for (std::size_t j = 0; j < k; ++j) row[flat[off + j]] = 1.0;
    branch(st, depth + 1);
  }
  std::fill(row.begin(), row.end(), 1.0);
}

DiscretePlacement optimize_uncoded_exact(const BsInstance& inst,
                                         const std::vector<std::size_t>& caps) {
  const std::size_t num_files = inst.popularity.num_files;

  double combinations = 1.0;
  for (std::size_t n = 0; n < inst.num_bs; ++n) {
    double c = 1.0;
    for (std::size_t j = 0; j < caps[n]; ++j)
      c = c * static_cast<double>(num_files - j) / static_cast<double>(j + 1);
    combinations *= c;
    if (combinations > 1e7)
      throw std::invalid_argument(
          "optimize_uncoded: exact mode refuses instances with more than 1e7 subset "
          "combinations; use local_search");
  }

  BranchState st;
  st.inst = &inst;
  st.sizes = caps;
  st.choices.resize(inst.num_bs);
  for (std::size_t n = 0; n < inst.num_bs; ++n)
    enumerate_subsets(num_files, caps[n], st.choices[n]);
  st.x.assign(inst.num_bs, std::vector<double>(num_files, 1.0));
  branch(st, 0);

  DiscretePlacement placement;
  placement.stored.assign(inst.num_bs, std::vector<std::uint8_t>(num_files, 0));
  for (std::size_t n = 0; n < inst.num_bs; ++n)
    for (std::size_t f = 0; f < num_files; ++f)
      placement.stored[n][f] = st.best_x[n][f] > 0.5 ? 1 : 0;
  return placement;
}

// ---- steepest-descent single-file swaps ----

class SwapSearch {
 public:
  SwapSearch(const BsInstance& inst, const std::vector<std::size_t>& caps)
      : inst_(inst), caps_(caps), num_files_(inst.popularity.num_files) {
    const auto& scenarios = inst.scenarios.scenarios;
    capacity_term_.assign(scenarios.size(), std::vector<double>(inst.num_bs));
    for (std::size_t s = 0; s < scenarios.size(); ++s)
      for (std::size_t n = 0; n < inst.num_bs; ++n)
        capacity_term_[s][n] =
            std::min(1.0, inst.rate * scenarios[s].per_cell_sojourn_s[n]);
  }

  DiscretePlacement descend(DiscretePlacement placement) {
    const auto& scenarios = inst_.scenarios.scenarios;
    // inner[s][f] = sum over stations of the per-station collectible amount.
    inner_.assign(scenarios.size(), std::vector<double>(num_files_, 0.0));
    for (std::size_t s = 0; s < scenarios.size(); ++s)
      for (std::size_t n = 0; n < inst_.num_bs; ++n)
        for (std::size_t f = 0; f < num_files_; ++f)
          if (placement.stored[n][f]) inner_[s][f] += capacity_term_[s][n];

    file_failure_.assign(num_files_, 0.0);
    for (std::size_t f = 0; f < num_files_; ++f) file_failure_[f] = column_failure(f);

    while (true) {
      double best_delta = -1e-15;
      std::size_t best_n = 0, best_out = num_files_, best_in = 0;
      for (std::size_t n = 0; n < inst_.num_bs; ++n) {
        std::size_t used = 0;
        for (std::size_t f = 0; f < num_files_; ++f) used += placement.stored[n][f];
        for (std::size_t f_in = 0; f_in < num_files_; ++f_in) {
          if (placement.stored[n][f_in]) continue;
          const double gain_in =
              inst_.popularity.pmf[f_in] * (column_failure_shifted(f_in, n, +1) - file_failure_[f_in]);
          if (used < caps_[n]) {
            if (gain_in < best_delta) {
              best_delta = gain_in;
              best_n = n;
              best_out = num_files_;
              best_in = f_in;
            }
          }
          for (std::size_t f_out = 0; f_out < num_files_; ++f_out) {
            if (!placement.stored[n][f_out]) continue;
            const double delta =
                gain_in + inst_.popularity.pmf[f_out] *
                              (column_failure_shifted(f_out, n, -1) - file_failure_[f_out]);
            if (delta < best_delta) {
              best_delta = delta;
              best_n = n;
              best_out = f_out;
              best_in = f_in;
            }
          }
        }
      }
      if (best_delta >= -1e-15) break;
      apply(placement, best_n, best_out, best_in);
    }
    return placement;
  }

 private:
  double column_failure(std::size_t f) const {
    const auto& scenarios = inst_.scenarios.scenarios;
    double fail = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s)
      if (inner_[s][f] < 1.0 - kCompletionTol) fail += scenarios[s].weight;
    return fail;
  }

  // Column failure if station n's copy of file f were toggled on (+1) / off (-1).
  double column_failure_shifted(std::size_t f, std::size_t n, int sign) const {
    const auto& scenarios = inst_.scenarios.scenarios;
    double fail = 0.0;
    for (std::size_t s = 0; s < scenarios.size(); ++s) {
      const double inner = inner_[s][f] + sign * capacity_term_[s][n];
      if (inner < 1.0 - kCompletionTol) fail += scenarios[s].weight;
    }
    return fail;
  }

  void apply(DiscretePlacement& placement, std::size_t n, std::size_t f_out, std::size_t f_in) {
    const auto& scenarios = inst_.scenarios.scenarios;
    if (f_out < num_files_) {
      placement.stored[n][f_out] = 0;
      for (std::size_t s = 0; s < scenarios.size(); ++s) inner_[s][f_out] -= capacity_term_[s][n];
      file_failure_[f_out] = column_failure(f_out);
    }
    placement.stored[n][f_in] = 1;
    for (std::size_t s = 0; s < scenarios.size(); ++s) inner_[s][f_in] += capacity_term_[s][n];
    file_failure_[f_in] = column_failure(f_in);
  }

  const BsInstance& inst_;
  const std::vector<std::size_t>& caps_;
  std::size_t num_files_;
  std::vector<std::vector<double>> capacity_term_;  // [scenario][station]
  std::vector<std::vector<double>> inner_;          // [scenario][file]
  std::vector<double> file_failure_;                // [file]
};

DiscretePlacement random_discrete_placement(const BsInstance& inst,
                                            const std::vector<std::size_t>& caps,
                                            std::mt19937_64& rng) {
  const std::size_t num_files = inst.popularity.num_files;
  DiscretePlacement placement;
  placement.stored.assign(inst.num_bs, std::vector<std::uint8_t>(num_files, 0));
  std::vector<std::size_t> pool(num_files);
  for (std::size_t n = 0; n < inst.num_bs; ++n) {
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t k = 0; k < caps[n]; ++k) {
      const std::size_t pick = k + uniform_index(rng, num_files - k);
      std::swap(pool[k], pool[pick]);
      placement.stored[n][pool[k]] = 1;
    }
  }
  return placement;
}

}  // namespace

DiscretePlacement optimize_uncoded(const BsInstance& inst, UncodedMode mode, std::uint64_t seed,
                                   std::size_t restarts) {
  check_instance(inst);
  const auto caps = integer_caps(inst);

  if (mode == UncodedMode::exact) return optimize_uncoded_exact(inst, caps);

  SwapSearch search(inst, caps);
  Capacities real_caps;
  real_caps.per_node.assign(caps.begin(), caps.end());
  DiscretePlacement best =
      search.descend(mpc_placement(inst.popularity, real_caps, inst.num_bs));
  double best_failure = failure_probability(best, inst);

  auto rng = make_rng(mix_seed(seed, 0x10ca1));
  for (std::size_t r = 1; r < restarts; ++r) {
    DiscretePlacement candidate =
        search.descend(random_discrete_placement(inst, caps, rng));
    const double failure = failure_probability(candidate, inst);
    if (failure < best_failure) {
      best_failure = failure;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace mobcache
