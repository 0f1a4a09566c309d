#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <vector>

#include "probecert/greedy.hpp"
#include "probecert/instances.hpp"
#include "probecert/lp.hpp"
#include "probecert/rounding.hpp"

using namespace probecert;

namespace {

// Monte-Carlo cost of a full order: sample scenarios and simulate coverage.
double mc_order_cost(const std::vector<int>& order, const ScenarioDistribution& d, const Matroid& m,
                     long worlds, Rng& rng, double* stddev_out) {
  std::vector<double> costs;
  for (long i = 0; i < worlds; ++i)
    costs.push_back(scenario_cover_time(order, m, d.sample(rng)));
  double mean = 0;
  for (double c : costs) mean += c;
  mean /= worlds;
  double ss = 0;
  for (double c : costs) ss += (c - mean) * (c - mean);
  *stddev_out = std::sqrt(ss / std::max<long>(1, worlds - 1));
  return mean;
}

}  // namespace

TEST_CASE("randomized rounding basics") {
  SECTION("zero schedule probes nothing") {
    FractionalSchedule x(4);
    Rng rng(1);
    auto order = randomized_rounding(x, 2.0, rng);
    REQUIRE(order.probes.empty());
  }
  SECTION("a unit first-slot element is probed in epoch 1 with certainty") {
    FractionalSchedule x(4);
    x.at(2, 0) = 1.0;
    Rng rng(2);
    auto order = randomized_rounding(x, 1.0, rng);
    REQUIRE(order.epoch_end.front().first == 1);
    REQUIRE(std::find(order.probes.begin(), order.probes.begin() + order.epoch_end.front().second, 2) !=
            order.probes.begin() + order.epoch_end.front().second);
  }
  SECTION("alpha below 1 is rejected") {
    FractionalSchedule x(4);
    Rng rng(3);
    REQUIRE_THROWS_AS(randomized_rounding(x, 0.5, rng), PreconditionError);
  }
}

TEST_CASE("probe-count concentration across epochs") {
  // n = 16 feasible schedule spreading unit mass along the diagonal
  const int n = 16;
  FractionalSchedule x(n);
  for (int e = 0; e < n; ++e) x.at(e, e) = 1.0;
  const double alpha = 4 * std::log(n);
  Rng rng(7);
  const int trials = 10000;
  const int epochs = static_cast<int>(std::ceil(std::log2(n)));
  std::vector<int> bad(epochs, 0);
  for (int trial = 0; trial < trials; ++trial) {
    Rng sub = rng.substream(trial);
    auto order = randomized_rounding(x, alpha, sub);
    for (int s = 0; s < epochs; ++s) {
      const double cap = 18.0 * std::log(n) * std::pow(2.0, s + 1);
      if (order.epoch_end[s].second > cap) bad[s]++;
    }
  }
  for (int s = 0; s < epochs; ++s)
    REQUIRE(bad[s] <= trials / (n * n));  // 1/n^2 of trials
}

TEST_CASE("order completion and exact cost") {
  SECTION("probing a single scenario's basis first pays its size") {
    Matroid m = Matroid::uniform(4, 2);
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(4, {1, 3}));
    REQUIRE(order_cost({1, 3, 0, 2}, d, m) == Catch::Approx(2.0));
  }
  SECTION("uniform(2,1) on disjoint singletons: order (0,1) costs 1.5") {
    Matroid m = Matroid::uniform(2, 1);
    auto d = ScenarioDistribution::uniform_over(2, {Bits::from_ids(2, {0}), Bits::from_ids(2, {1})});
    REQUIRE(order_cost({0, 1}, d, m) == Catch::Approx(1.5));
  }
  SECTION("every order pays at least the matroid rank") {
    Rng rng(5);
    auto inst = random_correlated_instance(5, 4, Matroid::Kind::Partition, 99);
    for (int t = 0; t < 10; ++t) {
      auto order = rng.permutation(5);
      REQUIRE(order_cost(order, inst.dist, inst.matroid) >= inst.matroid.rank_full() - 1e-9);
    }
  }
  SECTION("non-spanning support scenario raises infeasibility") {
    Matroid m = Matroid::uniform(2, 2);
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(2, {0}));
    REQUIRE_THROWS_AS(order_cost({0, 1}, d, m), InfeasibleError);
  }
  SECTION("complete_order appends missing elements in id order") {
    RoundedOrder r;
    r.probes = {2, 0};
    REQUIRE(complete_order(r, 4) == std::vector<int>{2, 0, 1, 3});
  }
}

TEST_CASE("exact cost agrees with Monte-Carlo simulation") {
  Rng rng(11);
  auto inst = random_correlated_instance(5, 5, Matroid::Kind::Graphic, 1234);
  auto order = rng.permutation(5);
  const double exact = order_cost(order, inst.dist, inst.matroid);
  double sd = 0;
  const double mc = mc_order_cost(order, inst.dist, inst.matroid, 20000, rng, &sd);
  REQUIRE(std::abs(mc - exact) <= 3 * sd / std::sqrt(20000.0) + 1e-9);
}

TEST_CASE("matroid sampling guarantee") {
  SECTION("basis indicator at beta = 1 keeps full rank") {
    Matroid m = Matroid::uniform(4, 2);
    Bits s = Bits::full(4);
    std::vector<double> y{1, 1, 0, 0};  // indicator of a basis
    Rng rng(3);
    auto res = matroid_sampling_check(m, s, y, 1.0, 2000, rng);
    REQUIRE(res.mean_rank == Catch::Approx(2.0));
    REQUIRE(res.mean_rank >= res.lower_bound - 1e-9);
  }
  SECTION("uniform(4,2) with y = half, beta = 2: Monte Carlo matches exact enumeration") {
    Matroid m = Matroid::uniform(4, 2);
    Bits s = Bits::full(4);
    std::vector<double> y{0.5, 0.5, 0.5, 0.5};
    Rng rng(4);
    auto res = matroid_sampling_check(m, s, y, 2.0, 50000, rng);
    const double exact = exact_sampling_expectation(m, s, y, 2.0);
    REQUIRE(std::abs(res.mean_rank - exact) <= 3 * res.stddev / std::sqrt(50000.0));
    REQUIRE(res.mean_rank >= res.lower_bound - 3 * res.stddev / std::sqrt(50000.0));
  }
  SECTION("huge beta saturates at full rank") {
    Matroid m = Matroid::partition({{0, 1}, {2, 3}}, {1, 1});
    Bits s = Bits::full(4);
    std::vector<double> y{0.5, 0.5, 0.5, 0.5};
    Rng rng(5);
    auto res = matroid_sampling_check(m, s, y, 50.0, 500, rng);
    REQUIRE(res.mean_rank == Catch::Approx(2.0));
  }
  SECTION("points outside the scaled base polymatroid are rejected") {
    Matroid m = Matroid::uniform(3, 2);
    Bits s = Bits::full(3);
    std::vector<double> y{5.0, 0.01, 0.01};  // scaled copy violates z({0}) <= 1
    Rng rng(6);
    REQUIRE_THROWS_AS(matroid_sampling_check(m, s, y, 1.0, 10, rng), PreconditionError);
  }
}

TEST_CASE("alpha-point rounding") {
  SECTION("integral schedules reproduce their permutation") {
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
      auto order = rng.permutation(6);
      FractionalSchedule x = FractionalSchedule::from_order(order);
      auto rounded = round_k_uniform(x, 1.0, rng);
      REQUIRE(rounded.probes == order);
    }
  }
  SECTION("k = 1 single scenario: rounding stays within factor 4 of the exhaustive optimum") {
    // scenario {3}; optimal order probes 3 first at cost 1
    const int n = 5;
    Matroid m = Matroid::uniform(n, 1);
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(n, {3}));
    SgdConfig cfg;
    cfg.mode = SgdConfig::Mode::FullGradient;
    auto sol = solve_lp(d, m, cfg);
    auto [opt_order, opt_cost] = brute_force_opt_order(d);
    REQUIRE(opt_cost == Catch::Approx(1.0));
    Rng rng(31);
    double mean = 0;
    const int trials = 2000;
    for (int t = 0; t < trials; ++t) {
      Rng sub = rng.substream(t);
      auto rounded = round_k_uniform(sol.x, 1.0, sub);
      mean += scenario_cover_time(complete_order(rounded, n), m, Bits::from_ids(n, {3}));
    }
    mean /= trials;
    REQUIRE(mean <= 4.0 * opt_cost);
  }
}

TEST_CASE("end-to-end rounding stays within the logarithmic budget") {
  // LP solve + alg-1 rounding on small instances; loose empirical constant
  for (uint64_t seed : {71u, 72u, 73u}) {
    auto kind = seed % 3 == 0   ? Matroid::Kind::Uniform
                : seed % 3 == 1 ? Matroid::Kind::Partition
                                : Matroid::Kind::Graphic;
    auto inst = random_correlated_instance(4, 4, kind, seed);
    SgdConfig cfg;
    cfg.mode = SgdConfig::Mode::FullGradient;
    auto sol = solve_lp(inst.dist, inst.matroid, cfg);
    const int n = static_cast<int>(inst.dist.n());
    const double alpha = 4 * std::log(n);
    Rng rng(seed);
    double mean = 0;
    const int trials = 500;
    for (int t = 0; t < trials; ++t) {
      Rng sub = rng.substream(t);
      auto rounded = randomized_rounding(sol.x, alpha, sub);
      mean += order_cost(complete_order(rounded, n), inst.dist, inst.matroid);
    }
    mean /= trials;
    REQUIRE(mean <= 40.0 * std::log(n) * sol.objective);
  }
}
