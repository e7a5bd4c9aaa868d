#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mobcache/bs_place.hpp"
#include "mobcache/rng.hpp"
#include "oracles.hpp"

using namespace mobcache;

namespace {

BsInstance make_instance(std::size_t num_bs, std::size_t num_files, double gamma, double rate,
                         double cap, std::vector<std::vector<double>> sojourns) {
  BsInstance inst;
  inst.num_bs = num_bs;
  inst.popularity = zipf_pmf(num_files, gamma);
  inst.rate = rate;
  inst.caps.per_node.assign(num_bs, cap);
  inst.scenarios.scenarios.resize(sojourns.size());
  for (std::size_t s = 0; s < sojourns.size(); ++s) {
    inst.scenarios.scenarios[s].per_cell_sojourn_s = std::move(sojourns[s]);
    inst.scenarios.scenarios[s].weight = 1.0 / static_cast<double>(inst.scenarios.scenarios.size());
  }
  return inst;
}

CodedPlacement full_placement(std::size_t num_bs, std::size_t num_files) {
  CodedPlacement p;
  p.x.assign(num_bs, std::vector<double>(num_files, 1.0));
  return p;
}

CodedPlacement zero_placement(std::size_t num_bs, std::size_t num_files) {
  CodedPlacement p;
  p.x.assign(num_bs, std::vector<double>(num_files, 0.0));
  return p;
}

}  // namespace

TEST_CASE("downloaded_fraction: rate-limited single station") {
  const double x[] = {1.0};
  const double sojourn[] = {0.5};
  CHECK(downloaded_fraction(x, sojourn, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("downloaded_fraction: empty cache downloads nothing") {
  const double x[] = {0.0, 0.0, 0.0};
  const double sojourn[] = {10.0, 10.0, 10.0};
  CHECK(downloaded_fraction(x, sojourn, 1.0) == 0.0);
}

TEST_CASE("downloaded_fraction: revisits contribute through the total sojourn") {
  // Path visiting stations 1,2,5,2,3 in order; station 2 is seen twice for
  // 0.3 s each at unit rate, capped by its stored fraction 0.4.
  const std::vector<std::pair<std::size_t, double>> visits = {
      {1, 0.2}, {2, 0.3}, {5, 0.1}, {2, 0.3}, {3, 0.15}};
  std::vector<double> x(6, 0.0);
  x[1] = 0.1;
  x[2] = 0.4;
  x[3] = 0.2;
  x[5] = 0.05;
  std::vector<double> totals(6, 0.0);
  for (const auto& [cell, s] : visits) totals[cell] += s;

  const double direct = downloaded_fraction(x, totals, 1.0);
  const double simulated = oracles::ordered_download(x, visits, 1.0);
  CHECK(direct == doctest::Approx(simulated).epsilon(1e-12));
  // station 2's contribution is min(0.4, 0.6) = 0.4
  CHECK(direct == doctest::Approx(0.1 + 0.4 + 0.05 + 0.15));
}

TEST_CASE("downloaded_fraction equals the per-visit simulation on random ordered paths") {
  auto rng = make_rng(19);
  for (int it = 0; it < 1000; ++it) {
    const std::size_t num_bs = 1 + uniform_index(rng, 6);
    const std::size_t num_visits = 1 + uniform_index(rng, 10);
    std::vector<std::pair<std::size_t, double>> visits(num_visits);
    std::vector<double> totals(num_bs, 0.0);
    for (auto& [cell, s] : visits) {
      cell = uniform_index(rng, num_bs);
      s = 2.0 * uniform01(rng);
      totals[cell] += s;
    }
    std::vector<double> x(num_bs);
    for (auto& xi : x) xi = uniform01(rng);
    const double rate = 0.1 + uniform01(rng);
    REQUIRE(downloaded_fraction(x, totals, rate) ==
            doctest::Approx(oracles::ordered_download(x, visits, rate)).epsilon(1e-12));
  }
}

TEST_CASE("failure_probability: saturated system never fails") {
  auto inst = make_instance(2, 3, 1.0, 1.0, 3.0, {{2.0, 2.0}, {1.5, 0.0}});
  CHECK(failure_probability(full_placement(2, 3), inst) == 0.0);
}

TEST_CASE("failure_probability: empty placement always fails") {
  auto inst = make_instance(2, 3, 1.0, 1.0, 1.0, {{2.0, 2.0}});
  CHECK(failure_probability(zero_placement(2, 3), inst) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("failure_probability: hand-enumerable two-scenario instance") {
  // Two files, two scenarios. Station 0 stores file 0 fully, station 1
  // stores file 1 fully. Scenario 0 reaches both stations long enough for
  // either file; scenario 1 only reaches station 0, so only (scenario 1,
  // file 1) fails, a mass of 0.5 * pmf[1].
  auto inst = make_instance(2, 2, 1.0, 1.0, 1.0, {{2.0, 2.0}, {2.0, 0.0}});
  CodedPlacement p = zero_placement(2, 2);
  p.x[0][0] = 1.0;
  p.x[1][1] = 1.0;

  double expected = 0.0;  // enumeration over (scenario, file)
  for (std::size_t s = 0; s < 2; ++s)
    for (std::size_t f = 0; f < 2; ++f) {
      double total = 0.0;
      for (std::size_t n = 0; n < 2; ++n)
        total += std::min(p.x[n][f], inst.rate * inst.scenarios.scenarios[s].per_cell_sojourn_s[n]);
      if (total < 1.0) expected += 0.5 * inst.popularity.pmf[f];
    }
  CHECK(expected == doctest::Approx(0.5 * inst.popularity.pmf[1]));
  CHECK(failure_probability(p, inst) == doctest::Approx(expected));
}

TEST_CASE("failure_probability: dimension mismatch is rejected") {
  auto inst = make_instance(2, 3, 1.0, 1.0, 1.0, {{1.0, 1.0}});
  CHECK_THROWS_AS(failure_probability(full_placement(3, 3), inst), std::invalid_argument);
  CHECK_THROWS_AS(failure_probability(full_placement(2, 2), inst), std::invalid_argument);
}

TEST_CASE("served_fraction_objective: trivial endpoints") {
  auto inst = make_instance(2, 2, 0.5, 1.0, 2.0, {{3.0, 3.0}});
  CHECK(served_fraction_objective(full_placement(2, 2), inst) == doctest::Approx(1.0));
  CHECK(served_fraction_objective(zero_placement(2, 2), inst) == 0.0);
}

TEST_CASE("served_fraction_objective: midpoint concavity on random instances") {
  auto rng = make_rng(29);
  for (int it = 0; it < 1000; ++it) {
    auto inst = oracles::random_bs_instance(rng);
    const std::size_t n = inst.num_bs;
    const std::size_t fn = inst.popularity.num_files;
    CodedPlacement a = zero_placement(n, fn), b = zero_placement(n, fn), mid = zero_placement(n, fn);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t f = 0; f < fn; ++f) {
        a.x[i][f] = uniform01(rng);
        b.x[i][f] = uniform01(rng);
        mid.x[i][f] = 0.5 * (a.x[i][f] + b.x[i][f]);
      }
    const double lhs = served_fraction_objective(mid, inst);
    const double rhs =
        0.5 * (served_fraction_objective(a, inst) + served_fraction_objective(b, inst));
    REQUIRE(lhs >= rhs - 1e-12);
  }
}

TEST_CASE("failure monotone: storing more never hurts") {
  auto rng = make_rng(37);
  for (int it = 0; it < 1000; ++it) {
    auto inst = oracles::random_bs_instance(rng);
    const std::size_t n = inst.num_bs;
    const std::size_t fn = inst.popularity.num_files;
    inst.caps.per_node.assign(n, static_cast<double>(fn));  // keep flips feasible
    DiscretePlacement p;
    p.stored.assign(n, std::vector<std::uint8_t>(fn, 0));
    for (auto& row : p.stored)
      for (auto& v : row) v = uniform01(rng) < 0.5 ? 1 : 0;

    const double before = failure_probability(p, inst);
    auto flipped = p;
    const std::size_t fi = uniform_index(rng, n);
    const std::size_t ff = uniform_index(rng, fn);
    flipped.stored[fi][ff] = 1;
    REQUIRE(failure_probability(flipped, inst) <= before + 1e-12);
  }
}

TEST_CASE("failure monotone in rate and sojourns") {
  auto rng = make_rng(41);
  for (int it = 0; it < 1000; ++it) {
    auto inst = oracles::random_bs_instance(rng);
    const std::size_t n = inst.num_bs;
    const std::size_t fn = inst.popularity.num_files;
    CodedPlacement p = zero_placement(n, fn);
    for (auto& row : p.x)
      for (auto& v : row) v = uniform01(rng);

    const double base = failure_probability(p, inst);
    auto faster = inst;
    faster.rate *= 1.0 + uniform01(rng);
    REQUIRE(failure_probability(p, faster) <= base + 1e-12);

    auto longer = inst;
    const std::size_t si = uniform_index(rng, longer.scenarios.scenarios.size());
    const std::size_t ci = uniform_index(rng, n);
    longer.scenarios.scenarios[si].per_cell_sojourn_s[ci] += uniform01(rng);
    REQUIRE(failure_probability(p, longer) <= base + 1e-12);
  }
}

TEST_CASE("projection: feasible input is unchanged") {
  const double v[] = {0.2, 0.3, 0.1};
  const auto u = project_capped_simplex(v, 1.0);
  CHECK(u[0] == doctest::Approx(0.2));
  CHECK(u[1] == doctest::Approx(0.3));
  CHECK(u[2] == doctest::Approx(0.1));
}

TEST_CASE("projection: symmetric overflow splits the cap") {
  const double v[] = {2.0, 2.0};
  const auto u = project_capped_simplex(v, 1.0);
  CHECK(u[0] == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(u[1] == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("projection: matches the active-set oracle on small dimensions") {
  auto rng = make_rng(53);
  for (int it = 0; it < 400; ++it) {
    const std::size_t n = 1 + uniform_index(rng, 4);
    std::vector<double> v(n);
    for (auto& vi : v) vi = -1.0 + 3.0 * uniform01(rng);
    const double cap = 3.0 * uniform01(rng);

    const auto got = project_capped_simplex(v, cap);
    const auto want = oracles::active_set_projection(v, cap);
    REQUIRE(want.size() == n);
    for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(got[i] - want[i]) <= 1e-9);

    double sum = 0.0;
    for (double ui : got) {
      REQUIRE(ui >= -1e-12);
      REQUIRE(ui <= 1.0 + 1e-12);
      sum += ui;
    }
    REQUIRE(sum <= cap + 1e-9);
  }
}

TEST_CASE("projection: negative cap rejected, zero cap zeroes out") {
  const double v[] = {0.5, 0.7};
  CHECK_THROWS_AS(project_capped_simplex(v, -0.1), std::invalid_argument);
  const auto u = project_capped_simplex(v, 0.0);
  CHECK(u[0] == doctest::Approx(0.0).scale(1));
  CHECK(u[1] == doctest::Approx(0.0).scale(1));
}

TEST_CASE("optimize_coded: single station, two files, saturated sojourns") {
  auto inst = make_instance(1, 2, 1.0, 1.0, 1.0, {{5.0}});
  const auto placement = optimize_coded(inst, 4000, 1);
  const double obj = served_fraction_objective(placement, inst);
  // With capacity one and saturated time, the cache holds one full file;
  // putting it all on the popular file yields pmf[0].
  CHECK(obj == doctest::Approx(inst.popularity.pmf[0]).epsilon(1e-3));
  // 1-D grid oracle at 1e-3 resolution over the same instance
  double best = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double x0 = static_cast<double>(i) / 1000.0;
    std::vector<std::vector<double>> x = {{x0, std::min(1.0, 1.0 - x0)}};
    best = std::max(best, oracles::served_fraction(x, inst));
  }
  CHECK(std::abs(obj - best) <= 2e-3);
}

TEST_CASE("optimize_coded: ample capacity and time reach full service") {
  auto inst = make_instance(2, 3, 0.7, 1.0, 3.0, {{4.0, 4.0}});
  const auto placement = optimize_coded(inst, 3000, 2);
  CHECK(served_fraction_objective(placement, inst) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("optimize_coded: within 1e-3 of grid search on random 2x2 instances") {
  auto rng = make_rng(61);
  for (int it = 0; it < 12; ++it) {
    BsInstance inst;
    inst.num_bs = 2;
    inst.popularity = zipf_pmf(2, 2.0 * uniform01(rng));
    inst.rate = 0.3 + uniform01(rng);
    inst.caps.per_node = {0.3 + 1.5 * uniform01(rng), 0.3 + 1.5 * uniform01(rng)};
    const std::size_t scenarios = 1 + uniform_index(rng, 3);
    inst.scenarios.scenarios.resize(scenarios);
    for (auto& s : inst.scenarios.scenarios) {
      s.weight = 1.0 / static_cast<double>(scenarios);
      s.per_cell_sojourn_s = {2.0 * uniform01(rng), 2.0 * uniform01(rng)};
    }

    const auto placement = optimize_coded(inst, 60000, 100 + it);
    const double solver = failure_probability(placement, inst);
    const double grid = oracles::grid_search_failure_2x2(inst, 1000);
    REQUIRE(std::abs(solver - grid) <= 1e-3);
  }
}

TEST_CASE("optimize_coded dominates MPC and random feasible placements") {
  auto rng = make_rng(67);
  for (int it = 0; it < 5; ++it) {
    auto inst = oracles::random_bs_instance(rng, 3, 4, 3);
    const auto placement = optimize_coded(inst, 20000, 200 + it);
    const double solver = failure_probability(placement, inst);

    const auto mpc = mpc_placement(inst.popularity, inst.caps, inst.num_bs);
    REQUIRE(solver <= failure_probability(mpc, inst) + 1e-12);

    for (int r = 0; r < 100; ++r) {
      CodedPlacement random;
      random.x.assign(inst.num_bs, std::vector<double>(inst.popularity.num_files));
      for (std::size_t n = 0; n < inst.num_bs; ++n) {
        for (auto& xi : random.x[n]) xi = uniform01(rng);
        random.x[n] = project_capped_simplex(random.x[n], inst.caps.per_node[n]);
      }
      REQUIRE(solver <= failure_probability(random, inst) + 1e-6);
    }
  }
}

TEST_CASE("optimize_uncoded exact: matches exhaustive enumeration on a 2x3 instance") {
  auto inst = make_instance(2, 3, 0.9, 1.0, 1.0, {{1.2, 0.3}, {0.2, 2.0}});
  const auto placement = optimize_uncoded(inst, UncodedMode::exact, 0);
  CHECK(failure_probability(placement, inst) == oracles::exhaustive_min_failure(inst));
}

TEST_CASE("optimize_uncoded: zero capacity leaves everything failing") {
  auto inst = make_instance(2, 3, 1.0, 1.0, 0.0, {{2.0, 2.0}});
  for (auto mode : {UncodedMode::exact, UncodedMode::local_search}) {
    const auto placement = optimize_uncoded(inst, mode, 0);
    for (const auto& row : placement.stored)
      for (auto v : row) CHECK(v == 0);
    CHECK(failure_probability(placement, inst) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("optimize_uncoded exact: isolated-station instances pick a completable popular file") {
  auto rng = make_rng(71);
  for (int it = 0; it < 50; ++it) {
    // Scenario 0 only ever reaches station 0; station 1 serves scenario 1.
    BsInstance inst;
    inst.num_bs = 2;
    inst.popularity = zipf_pmf(2, 0.3 + 1.5 * uniform01(rng));
    inst.rate = 1.0;
    inst.caps.per_node = {1.0, 1.0};
    inst.scenarios.scenarios.resize(2);
    inst.scenarios.scenarios[0].weight = 0.5;
    inst.scenarios.scenarios[0].per_cell_sojourn_s = {1.0 + uniform01(rng), 0.0};
    inst.scenarios.scenarios[1].weight = 0.5;
    inst.scenarios.scenarios[1].per_cell_sojourn_s = {0.0, 1.0 + uniform01(rng)};

    const auto placement = optimize_uncoded(inst, UncodedMode::exact, 0);
    REQUIRE(failure_probability(placement, inst) == oracles::exhaustive_min_failure(inst));
    // both stations can complete either file, so both should take file 0
    CHECK(placement.stored[0][0] == 1);
    CHECK(placement.stored[1][0] == 1);
  }
}

TEST_CASE("optimize_uncoded exact: equals exhaustive enumeration on 200 random instances") {
  auto rng = make_rng(73);
  for (int it = 0; it < 200; ++it) {
    auto inst = oracles::random_bs_instance(rng, 3, 4, 3);
    for (auto& c : inst.caps.per_node) c = 1.0;
    const auto placement = optimize_uncoded(inst, UncodedMode::exact, 0);
    REQUIRE(failure_probability(placement, inst) == oracles::exhaustive_min_failure(inst));
  }
}

TEST_CASE("optimize_uncoded exact: refuses oversized instances") {
  auto inst = make_instance(6, 100, 0.8, 0.01, 1.0,
                            {std::vector<double>(6, 30.0), std::vector<double>(6, 50.0)});
  CHECK_THROWS_AS(optimize_uncoded(inst, UncodedMode::exact, 0), std::invalid_argument);
}

TEST_CASE("optimize_uncoded local search: never worse than the MPC start") {
  auto rng = make_rng(79);
  for (int it = 0; it < 100; ++it) {
    auto inst = oracles::random_bs_instance(rng, 4, 6, 4);
    for (auto& c : inst.caps.per_node) c = static_cast<double>(1 + uniform_index(rng, 2));
    const auto local = optimize_uncoded(inst, UncodedMode::local_search, it);
    const auto mpc = mpc_placement(inst.popularity, inst.caps, inst.num_bs);
    REQUIRE(failure_probability(local, inst) <= failure_probability(mpc, inst) + 1e-12);
  }
}

TEST_CASE("optimize_uncoded local search: finds the exact optimum on small instances") {
  auto rng = make_rng(83);
  std::size_t optimal_hits = 0;
  const int instances = 60;
  for (int it = 0; it < instances; ++it) {
    auto inst = oracles::random_bs_instance(rng, 3, 4, 3);
    for (auto& c : inst.caps.per_node) c = 1.0;
    const auto local = optimize_uncoded(inst, UncodedMode::local_search, it);
    const double exact = oracles::exhaustive_min_failure(inst);
    REQUIRE(failure_probability(local, inst) >= exact - 1e-12);
    if (failure_probability(local, inst) <= exact + 1e-12) ++optimal_hits;
  }
  // steepest descent with restarts should land on the optimum most of the time
  CHECK(optimal_hits >= static_cast<std::size_t>(0.8 * instances));
}
