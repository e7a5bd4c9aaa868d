#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "mobcache/rng.hpp"
#include "mobcache/ut_place.hpp"
#include "oracles.hpp"

using namespace mobcache;

namespace {

UtInstance make_instance(std::size_t num_users, std::size_t num_files, double gamma,
                         double pair_rate, double threshold, double cap = 1.0) {
  UtInstance inst;
  inst.contacts.num_users = num_users;
  inst.contacts.rate.assign(num_users, std::vector<double>(num_users, 0.0));
  for (std::size_t i = 0; i < num_users; ++i)
    for (std::size_t j = 0; j < num_users; ++j)
      if (i != j) inst.contacts.rate[i][j] = pair_rate;
  inst.popularity = zipf_pmf(num_files, gamma);
  inst.delay_threshold_s = threshold;
  inst.caps.per_node.assign(num_users, cap);
  return inst;
}

DiscretePlacement empty_placement(std::size_t num_users, std::size_t num_files) {
  DiscretePlacement p;
  p.stored.assign(num_users, std::vector<std::uint8_t>(num_files, 0));
  return p;
}

}  // namespace

TEST_CASE("offload_probability: own cache serves immediately") {
  auto inst = make_instance(3, 2, 1.0, 0.1, 10.0);
  auto p = empty_placement(3, 2);
  p.stored[1][0] = 1;
  CHECK(offload_probability(1, 0, p, inst) == 1.0);
}

TEST_CASE("offload_probability: no holder anywhere means zero") {
  auto inst = make_instance(3, 2, 1.0, 0.1, 10.0);
  const auto p = empty_placement(3, 2);
  CHECK(offload_probability(0, 1, p, inst) == 0.0);
}

TEST_CASE("offload_probability: one holder at rate*threshold = ln 2 gives a half") {
  auto inst = make_instance(2, 1, 0.0, std::log(2.0), 1.0);
  auto p = empty_placement(2, 1);
  p.stored[1][0] = 1;
  CHECK(offload_probability(0, 0, p, inst) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("offloading_ratio: most-popular-content equals the head mass exactly") {
  for (std::size_t num_users : {3, 7, 20}) {
    auto inst = make_instance(num_users, 10, 1.3, 0.05, 50.0, 2.0);
    const auto mpc = mpc_placement(inst.popularity, inst.caps, num_users);
    const double ratio = offloading_ratio(mpc, inst);
    const double head = inst.popularity.pmf[0] + inst.popularity.pmf[1];
    CHECK(std::abs(ratio - head) <= 1e-12);
  }
}

TEST_CASE("offloading_ratio: empty is zero, everything cached is one") {
  auto inst = make_instance(4, 3, 0.8, 0.1, 5.0, 3.0);
  CHECK(offloading_ratio(empty_placement(4, 3), inst) == 0.0);
  DiscretePlacement full;
  full.stored.assign(4, std::vector<std::uint8_t>(3, 1));
  CHECK(offloading_ratio(full, inst) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("offloading_ratio: dimension mismatch rejected") {
  auto inst = make_instance(3, 2, 1.0, 0.1, 10.0);
  CHECK_THROWS_AS(offloading_ratio(empty_placement(2, 2), inst), std::invalid_argument);
  CHECK_THROWS_AS(offloading_ratio(empty_placement(3, 3), inst), std::invalid_argument);
}

TEST_CASE("greedy: a lone user takes the most popular files") {
  auto inst = make_instance(1, 5, 1.1, 0.0, 10.0, 2.0);
  const auto p = greedy_placement(inst);
  CHECK(p.stored[0][0] == 1);
  CHECK(p.stored[0][1] == 1);
  CHECK(p.stored[0][2] == 0);
}

TEST_CASE("greedy: two users with strong contacts diversify") {
  // pmf = (0.9, 0.1), rate * threshold = 10. Duplicating the popular file
  // scores 0.9; splitting the library scores almost 1.
  UtInstance inst = make_instance(2, 2, 0.0, 1.0, 10.0);
  inst.popularity.pmf = {0.9, 0.1};

  const auto greedy = greedy_placement(inst);
  CHECK(greedy.stored[0][0] == 1);
  CHECK(greedy.stored[1][1] == 1);

  const auto brute = brute_force_placement(inst);
  const double got = offloading_ratio(greedy, inst);
  const double best = offloading_ratio(brute, inst);
  CHECK(got == doctest::Approx(best).epsilon(1e-12));
  CHECK(got > 0.9);

  DiscretePlacement duplicated = empty_placement(2, 2);
  duplicated.stored[0][0] = duplicated.stored[1][0] = 1;
  CHECK(offloading_ratio(duplicated, inst) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("greedy: at least half the brute-force optimum on small instances") {
  auto rng = make_rng(101);
  double min_ratio = 1.0;
  for (int it = 0; it < 200; ++it) {
    const auto inst = oracles::random_ut_instance(rng, 4, 4, 1);
    const double got = offloading_ratio(greedy_placement(inst), inst);
    const double best = offloading_ratio(brute_force_placement(inst), inst);
    REQUIRE(best >= got - 1e-12);  // maximizer dominance
    if (best > 0.0) {
      REQUIRE(got >= 0.5 * best);
      min_ratio = std::min(min_ratio, got / best);
    }
  }
  CHECK(min_ratio >= 0.5);
}

TEST_CASE("greedy: incremental gains match naive recomputation") {
  auto rng = make_rng(103);
  for (int it = 0; it < 60; ++it) {
    const auto inst = oracles::random_ut_instance(rng, 5, 5, 2);
    std::vector<GreedyStep> fast_steps, naive_steps;
    const auto fast = greedy_placement(inst, &fast_steps);
    const auto naive = oracles::naive_greedy(inst, &naive_steps);

    REQUIRE(fast.stored == naive.stored);
    REQUIRE(fast_steps.size() == naive_steps.size());
    for (std::size_t k = 0; k < fast_steps.size(); ++k) {
      REQUIRE(fast_steps[k].user == naive_steps[k].user);
      REQUIRE(fast_steps[k].file == naive_steps[k].file);
      REQUIRE(std::abs(fast_steps[k].gain - naive_steps[k].gain) <= 1e-12);
    }
  }
}

TEST_CASE("monotonicity: adding an element never lowers the ratio") {
  auto rng = make_rng(107);
  for (int it = 0; it < 1000; ++it) {
    const auto inst = oracles::random_ut_instance(rng, 4, 4, 2);
    const std::size_t num_users = inst.contacts.num_users;
    const std::size_t num_files = inst.popularity.num_files;
    auto p = empty_placement(num_users, num_files);
    for (auto& row : p.stored)
      for (auto& v : row) v = uniform01(rng) < 0.4 ? 1 : 0;
    const double before = offloading_ratio(p, inst);
    const std::size_t u = uniform_index(rng, num_users);
    const std::size_t f = uniform_index(rng, num_files);
    p.stored[u][f] = 1;
    REQUIRE(offloading_ratio(p, inst) >= before - 1e-12);
  }
}

TEST_CASE("submodularity: marginal gains shrink as the placement grows") {
  auto rng = make_rng(109);
  for (int it = 0; it < 1000; ++it) {
    const auto inst = oracles::random_ut_instance(rng, 4, 4, 2);
    const std::size_t num_users = inst.contacts.num_users;
    const std::size_t num_files = inst.popularity.num_files;

    // S subset of T, element e outside T
    auto small = empty_placement(num_users, num_files);
    auto large = empty_placement(num_users, num_files);
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
    const double gain_small = offloading_ratio(small_plus, inst) - offloading_ratio(small, inst);
    const double gain_large = offloading_ratio(large_plus, inst) - offloading_ratio(large, inst);
    REQUIRE(gain_small >= gain_large - 1e-12);
  }
}

TEST_CASE("ratio is nondecreasing in rates and threshold") {
  auto rng = make_rng(113);
  for (int it = 0; it < 500; ++it) {
    const auto inst = oracles::random_ut_instance(rng, 4, 4, 1);
    const std::size_t num_users = inst.contacts.num_users;
    const std::size_t num_files = inst.popularity.num_files;
    auto p = empty_placement(num_users, num_files);
    for (auto& row : p.stored)
      for (auto& v : row) v = uniform01(rng) < 0.5 ? 1 : 0;
    const double base = offloading_ratio(p, inst);

    auto boosted = inst;
    const std::size_t i = uniform_index(rng, num_users);
    const std::size_t j = uniform_index(rng, num_users);
    if (i != j) {
      boosted.contacts.rate[i][j] += 0.5;
      boosted.contacts.rate[j][i] += 0.5;
    }
    REQUIRE(offloading_ratio(p, boosted) >= base - 1e-12);

    auto patient = inst;
    patient.delay_threshold_s *= 1.0 + uniform01(rng);
    REQUIRE(offloading_ratio(p, patient) >= base - 1e-12);
  }
}

TEST_CASE("random_zipf_placement: zero skew draws distinct files, deterministic by seed") {
  auto inst = make_instance(6, 8, 1.0, 0.1, 10.0, 3.0);
  const auto a = random_zipf_placement(inst, 0.0, 5);
  const auto b = random_zipf_placement(inst, 0.0, 5);
  REQUIRE(a.stored == b.stored);
  for (std::size_t u = 0; u < 6; ++u) {
    std::size_t count = 0;
    for (std::size_t f = 0; f < 8; ++f) count += a.stored[u][f];
    CHECK(count == 3);
  }
}

TEST_CASE("random_zipf_placement: huge skew converges to most popular content") {
  auto inst = make_instance(5, 6, 1.0, 0.1, 10.0, 2.0);
  const auto mpc = mpc_placement(inst.popularity, inst.caps, 5);
  for (int seed = 0; seed < 100; ++seed) {
    const auto p = random_zipf_placement(inst, 50.0, seed);
    REQUIRE(p.stored == mpc.stored);
  }
}

TEST_CASE("random_zipf_placement: zero capacity and oversized capacity") {
  auto inst = make_instance(3, 4, 1.0, 0.1, 10.0, 0.0);
  const auto p = random_zipf_placement(inst, 1.0, 1);
  for (const auto& row : p.stored)
    for (auto v : row) CHECK(v == 0);

  auto bad = make_instance(3, 4, 1.0, 0.1, 10.0, 5.0);
  CHECK_THROWS_AS(random_zipf_placement(bad, 1.0, 1), std::invalid_argument);
}

TEST_CASE("line_search_gamma: singleton grid returns its only value") {
  auto inst = make_instance(4, 5, 1.0, 0.1, 10.0);
  const double grid[] = {0.7};
  const auto result = line_search_gamma(inst, grid, 4, 3);
  CHECK(result.gamma_c == 0.7);
}

TEST_CASE("line_search_gamma: picks high skew when contacts are useless") {
  // No contacts at all: only self-caching matters, so concentrating every
  // cache on the head files maximizes the expected ratio.
  auto inst = make_instance(6, 10, 1.2, 0.0, 10.0);
  const double grid[] = {0.0, 50.0};
  const auto result = line_search_gamma(inst, grid, 16, 7);
  CHECK(result.gamma_c == 50.0);
  CHECK(result.mean_ratio == doctest::Approx(inst.popularity.pmf[0]).epsilon(1e-6));
}

TEST_CASE("line_search_gamma: deterministic given the seed") {
  auto rng = make_rng(127);
  const auto inst = oracles::random_ut_instance(rng, 5, 6, 2);
  const double grid[] = {0.0, 0.5, 1.0, 2.0};
  const auto a = line_search_gamma(inst, grid, 6, 11);
  const auto b = line_search_gamma(inst, grid, 6, 11);
  CHECK(a.gamma_c == b.gamma_c);
  CHECK(a.mean_ratio == b.mean_ratio);
}

TEST_CASE("brute_force_placement: lone user stores the top file") {
  auto inst = make_instance(1, 4, 1.0, 0.0, 10.0);
  const auto p = brute_force_placement(inst);
  CHECK(p.stored[0][0] == 1);
}

TEST_CASE("brute_force_placement: refuses oversized instances") {
  auto inst = make_instance(30, 40, 1.0, 0.01, 10.0);
  CHECK_THROWS_AS(brute_force_placement(inst), std::invalid_argument);
}
