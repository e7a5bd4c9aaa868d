#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "mobcache/bs_place.hpp"
#include "mobcache/evalsim.hpp"
#include "mobcache/rng.hpp"
#include "mobcache/ut_place.hpp"
#include "oracles.hpp"

using namespace mobcache;

namespace {

PathScenarioSet one_scenario(std::vector<double> sojourns) {
  PathScenarioSet set;
  set.scenarios.resize(1);
  set.scenarios[0].per_cell_sojourn_s = std::move(sojourns);
  set.scenarios[0].weight = 1.0;
  return set;
}

}  // namespace

TEST_CASE("bs replay: saturated placement never fails") {
  CodedPlacement p;
  p.x.assign(2, std::vector<double>(3, 1.0));
  const auto pop = zipf_pmf(3, 1.0);
  const auto report = simulate_bs_replay(one_scenario({2.0, 2.0}), p, pop, 1.0, 2000, 1);
  CHECK(report.empirical_value == 0.0);
  REQUIRE(report.analytic_value.has_value());
  CHECK(*report.analytic_value == 0.0);
}

TEST_CASE("bs replay: empty placement always fails") {
  CodedPlacement p;
  p.x.assign(2, std::vector<double>(3, 0.0));
  const auto pop = zipf_pmf(3, 1.0);
  const auto report = simulate_bs_replay(one_scenario({2.0, 2.0}), p, pop, 1.0, 2000, 1);
  CHECK(report.empirical_value == 1.0);
  CHECK(*report.analytic_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bs replay: agrees with the analytic value on random instances") {
  auto rng = make_rng(211);
  for (int it = 0; it < 6; ++it) {
    const auto inst = oracles::random_bs_instance(rng, 4, 5, 4);
    CodedPlacement p;
    p.x.assign(inst.num_bs, std::vector<double>(inst.popularity.num_files));
    for (auto& row : p.x)
      for (auto& v : row) v = uniform01(rng);

    const auto report =
        simulate_bs_replay(inst.scenarios, p, inst.popularity, inst.rate, 100000, 50 + it);
    REQUIRE(report.analytic_value.has_value());
    const double analytic = *report.analytic_value;
    CHECK(std::abs(report.empirical_value - analytic) <=
          std::max(0.01, 3.0 * report.std_error));
  }
}

TEST_CASE("bs replay: ordered trace walk matches the order-collapsed analytic value") {
  // Users revisit cells in arbitrary order; the analytic failure probability
  // only sees per-cell totals. Replay downloads visit by visit.
  auto rng = make_rng(223);
  AssociationTrace trace;
  const std::size_t num_users = 40;
  const std::size_t num_cells = 4;
  for (std::size_t u = 0; u < num_users; ++u) {
    double t = 0.0;
    const std::size_t visits = 2 + uniform_index(rng, 8);
    for (std::size_t k = 0; k < visits; ++k) {
      const double dur = 0.2 + 1.5 * uniform01(rng);
      trace.records.push_back({u, uniform_index(rng, num_cells), t, t + dur});
      t += dur;
    }
  }
  CodedPlacement p;
  p.x.assign(num_cells, std::vector<double>(5));
  for (auto& row : p.x)
    for (auto& v : row) v = uniform01(rng);
  const auto pop = zipf_pmf(5, 0.9);

  const auto report = simulate_bs_replay(trace, p, pop, 0.5, 200000, 17);
  REQUIRE(report.analytic_value.has_value());
  CHECK(std::abs(report.empirical_value - *report.analytic_value) <=
        std::max(0.01, 3.0 * report.std_error));
}

TEST_CASE("bs replay: deterministic under a fixed seed") {
  auto rng = make_rng(227);
  const auto inst = oracles::random_bs_instance(rng, 3, 4, 3);
  DiscretePlacement p;
  p.stored.assign(inst.num_bs, std::vector<std::uint8_t>(inst.popularity.num_files, 0));
  for (auto& row : p.stored)
    for (auto& v : row) v = uniform01(rng) < 0.5 ? 1 : 0;
  const auto a = simulate_bs_replay(inst.scenarios, p, inst.popularity, inst.rate, 5000, 3);
  const auto b = simulate_bs_replay(inst.scenarios, p, inst.popularity, inst.rate, 5000, 3);
  CHECK(a.empirical_value == b.empirical_value);
}

TEST_CASE("ut replay: everything self-cached is always served") {
  DiscretePlacement p;
  p.stored.assign(3, std::vector<std::uint8_t>(4, 1));
  const auto pop = zipf_pmf(4, 1.0);
  const auto model = random_contact_model(3, 0.01, 0.02, 5);
  const auto report = simulate_ut_replay(model, p, pop, 30.0, 2000, 1);
  CHECK(report.empirical_value == 1.0);
  CHECK(*report.analytic_value == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ut replay: empty placement is never served") {
  DiscretePlacement p;
  p.stored.assign(3, std::vector<std::uint8_t>(4, 0));
  const auto pop = zipf_pmf(4, 1.0);
  const auto model = random_contact_model(3, 0.01, 0.02, 5);
  const auto report = simulate_ut_replay(model, p, pop, 30.0, 2000, 1);
  CHECK(report.empirical_value == 0.0);
  CHECK(*report.analytic_value == 0.0);
}

TEST_CASE("ut replay: model input converges to the offloading ratio") {
  auto rng = make_rng(229);
  for (int it = 0; it < 6; ++it) {
    const std::size_t num_users = 3 + uniform_index(rng, 5);
    const std::size_t num_files = 2 + uniform_index(rng, 6);
    const auto model = random_contact_model(num_users, 0.001, 0.01, 60 + it);
    const auto pop = zipf_pmf(num_files, 1.5 * uniform01(rng));
    DiscretePlacement p;
    p.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
    for (auto& row : p.stored)
      for (auto& v : row) v = uniform01(rng) < 0.3 ? 1 : 0;

    const auto report = simulate_ut_replay(model, p, pop, 80.0, 100000, 90 + it);
    REQUIRE(report.analytic_value.has_value());
    CHECK(std::abs(report.empirical_value - *report.analytic_value) <=
          std::max(0.01, 3.0 * report.std_error));
  }
}

TEST_CASE("ut replay: error shrinks like one over sqrt trials") {
  const auto model = random_contact_model(6, 0.002, 0.02, 71);
  const auto pop = zipf_pmf(8, 0.8);
  DiscretePlacement p;
  p.stored.assign(6, std::vector<std::uint8_t>(8, 0));
  for (std::size_t u = 0; u < 6; ++u) p.stored[u][u] = 1;

  const auto small = simulate_ut_replay(model, p, pop, 50.0, 4000, 7);
  const auto large = simulate_ut_replay(model, p, pop, 50.0, 400000, 7);
  const double err_small = std::abs(small.empirical_value - *small.analytic_value);
  const double err_large = std::abs(large.empirical_value - *large.analytic_value);
  CHECK(err_small <= 5.0 * small.std_error + 1e-9);
  CHECK(err_large <= 5.0 * large.std_error + 1e-9);
  CHECK(large.std_error < small.std_error);
}

TEST_CASE("ut replay: real contact events serve within the threshold") {
  // One pair with contacts every 10 s; helper holds the only file. Requests
  // with threshold 25 s always meet a contact, threshold 1 s rarely does.
  ContactTrace trace;
  for (int k = 0; k < 100; ++k)
    trace.records.push_back({0, 1, 10.0 * k, 10.0 * k + 1.0});
  DiscretePlacement p;
  p.stored.assign(2, std::vector<std::uint8_t>(1, 0));
  p.stored[1][0] = 1;
  const auto pop = zipf_pmf(1, 0.0);

  const auto generous = simulate_ut_replay(trace, p, pop, 25.0, 4000, 3);
  CHECK_FALSE(generous.analytic_value.has_value());
  // user 1 self-serves, user 0 always finds a contact within 25 s
  CHECK(generous.empirical_value == doctest::Approx(1.0).epsilon(1e-12));

  const auto strict = simulate_ut_replay(trace, p, pop, 1.0, 4000, 3);
  // user 0 only succeeds when the request lands within 1 s of a contact
  CHECK(strict.empirical_value < 0.7);
  CHECK(strict.empirical_value > 0.5);  // user 1's half plus a sliver
}

TEST_CASE("ut replay: trace shorter than the threshold is rejected") {
  ContactTrace trace;
  trace.records.push_back({0, 1, 0.0, 5.0});
  DiscretePlacement p;
  p.stored.assign(2, std::vector<std::uint8_t>(1, 1));
  const auto pop = zipf_pmf(1, 0.0);
  CHECK_THROWS_AS(simulate_ut_replay(trace, p, pop, 100.0, 10, 1), std::invalid_argument);
}

TEST_CASE("ut replay: deterministic under a fixed seed") {
  const auto model = random_contact_model(5, 0.001, 0.01, 83);
  const auto pop = zipf_pmf(6, 1.0);
  DiscretePlacement p;
  p.stored.assign(5, std::vector<std::uint8_t>(6, 0));
  p.stored[0][0] = p.stored[2][1] = p.stored[4][3] = 1;
  const auto a = simulate_ut_replay(model, p, pop, 100.0, 20000, 13);
  const auto b = simulate_ut_replay(model, p, pop, 100.0, 20000, 13);
  CHECK(a.empirical_value == b.empirical_value);
}
