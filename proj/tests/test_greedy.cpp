#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "probecert/greedy.hpp"
#include "probecert/instances.hpp"

using namespace probecert;

namespace {

// Feige-style instance: scenarios {a}, {a}, {b} uniformly, i.e. {0} w.p. 2/3
// and {1} w.p. 1/3.
ScenarioDistribution feige_instance() {
  return ScenarioDistribution::explicit_support(
      2, {{Bits::from_ids(2, {0}), 2.0 / 3.0}, {Bits::from_ids(2, {1}), 1.0 / 3.0}});
}

ScenarioDistribution random_feasible(int n, int support, Rng& rng) {
  std::vector<std::pair<Bits, double>> atoms;
  double total = 0;
  long guard = 0;
  while (static_cast<int>(atoms.size()) < support) {
    Bits s(n);
    for (int e = 0; e < n; ++e)
      if (rng.bernoulli(0.4)) s.set(e);
    if (s.none()) continue;
    bool dup = false;
    for (auto& [t, p] : atoms)
      if (t == s) dup = true;
    if (dup && ++guard < 200) continue;
    if (dup) break;
    const double w = rng.exponential();
    atoms.emplace_back(s, w);
    total += w;
  }
  for (auto& [s, p] : atoms) p /= total;
  double acc = 0;
  for (size_t i = 0; i + 1 < atoms.size(); ++i) acc += atoms[i].second;
  atoms.back().second = 1.0 - acc;
  return ScenarioDistribution::explicit_support(n, atoms);
}

}  // namespace

TEST_CASE("conditional greedy hand examples") {
  SECTION("single scenario probes it first, cost 1") {
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(2, {0}));
    auto tr = conditional_greedy(d);
    REQUIRE(tr.order.front() == 0);
    REQUIRE(greedy_cost(tr) == Catch::Approx(1.0));
  }
  SECTION("higher marginal goes first") {
    // independent-ish marginals (0.947, 0.526) after conditioning away the
    // empty scenario of a (0.9, 0.5) product
    auto d = ScenarioDistribution::explicit_support(
        2, {{Bits::from_ids(2, {0}), 0.45 / 0.95},
            {Bits::from_ids(2, {1}), 0.05 / 0.95},
            {Bits::from_ids(2, {0, 1}), 0.45 / 0.95}});
    auto tr = conditional_greedy(d);
    REQUIRE(tr.order.front() == 0);
  }
  SECTION("Feige instance: order (0,1), cost 4/3 by all three identities") {
    auto tr = conditional_greedy(feige_instance());
    REQUIRE(tr.order == std::vector<int>{0, 1});
    REQUIRE(greedy_cost(tr) == Catch::Approx(4.0 / 3.0));
    REQUIRE(tr.q[0] == Catch::Approx(2.0 / 3.0));
    REQUIRE(tr.c[1] == Catch::Approx(1.0));
  }
  SECTION("empty scenario in support is infeasible") {
    auto d = ScenarioDistribution::explicit_support(2, {{Bits(2), 0.5}, {Bits::from_ids(2, {0}), 0.5}});
    REQUIRE_THROWS_AS(conditional_greedy(d), InfeasibleError);
  }
}

TEST_CASE("greedy cost counts uncovered mass for all slots") {
  // trace an order on a distribution containing the empty scenario
  auto d = ScenarioDistribution::explicit_support(2, {{Bits(2), 0.25}, {Bits::from_ids(2, {0, 1}), 0.75}});
  auto out = proxy_opt_diagnostics({0, 1}, d);
  // covered mass 0.75 at probe 1; empty scenario keeps paying both slots
  REQUIRE(out.cost == Catch::Approx(0.75 * 1 + 0.25 * 2));
}

TEST_CASE("cost identities hold on random feasible instances") {
  Rng rng(8);
  for (int trial = 0; trial < 200; ++trial) {
    auto d = random_feasible(2 + trial % 5, 2 + trial % 4, rng);
    auto tr = conditional_greedy(d);
    REQUIRE_NOTHROW(greedy_cost(tr));
    REQUIRE(tr.residual_end <= 1e-12);
  }
}

TEST_CASE("CNCP checker") {
  SECTION("independent product passes") {
    std::vector<std::pair<Bits, double>> atoms;
    for (uint64_t m = 0; m < 4; ++m) {
      const double p0 = (m & 1) ? 0.3 : 0.7, p1 = (m & 2) ? 0.6 : 0.4;
      atoms.emplace_back(Bits::from_mask(2, m), p0 * p1);
    }
    auto d = ScenarioDistribution::explicit_support(2, atoms);
    REQUIRE_FALSE(check_cncp(d).has_value());
  }
  SECTION("uniform over the two disjoint singletons passes") {
    auto d = ScenarioDistribution::uniform_over(2, {Bits::from_ids(2, {0}), Bits::from_ids(2, {1})});
    REQUIRE_FALSE(check_cncp(d).has_value());
  }
  SECTION("all-or-nothing pair is flagged with a witness") {
    auto d = ScenarioDistribution::explicit_support(2, {{Bits(2), 0.5}, {Bits::from_ids(2, {0, 1}), 0.5}});
    auto w = check_cncp(d);
    REQUIRE(w.has_value());
    REQUIRE(w->lhs < w->rhs - 1e-9);
  }
}

TEST_CASE("negatively associated families pass CNCP") {
  Rng rng(15);
  SECTION("weighted k-subset measures") {
    for (int trial = 0; trial < 10; ++trial) {
      const int n = 3 + trial % 3;
      const int k = 1 + trial % 2;
      std::vector<double> w(n);
      for (double& v : w) v = 0.2 + rng.next_unit();
      auto d = weighted_k_subset_distribution(n, k, w);
      REQUIRE_FALSE(check_cncp(d).has_value());
    }
  }
  SECTION("uniform spanning trees of the diamond graph") {
    auto d = uniform_spanning_tree_distribution(4, {{0, 1}, {0, 2}, {1, 2}, {1, 3}, {2, 3}});
    REQUIRE_FALSE(check_cncp(d).has_value());
  }
}

TEST_CASE("proxy diagnostics") {
  SECTION("point mass: opt = proxy = 1") {
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(1, {0}));
    auto out = proxy_opt_diagnostics({0}, d);
    REQUIRE(out.cost == Catch::Approx(1.0));
    REQUIRE(out.proxy == Catch::Approx(1.0));
  }
  SECTION("Feige optimal order: d* = (2/3, 2/3), proxy 1.5 <= 2 opt") {
    auto [order, opt] = brute_force_opt_order(feige_instance());
    auto out = proxy_opt_diagnostics(order, feige_instance());
    REQUIRE(out.dstar[0] == Catch::Approx(2.0 / 3.0));
    REQUIRE(out.dstar[1] == Catch::Approx(2.0 / 3.0));
    REQUIRE(out.proxy == Catch::Approx(1.5));
    REQUIRE(out.proxy <= 2 * opt + 1e-9);
    REQUIRE(out.cost == Catch::Approx(opt));
  }
  SECTION("on brute-force optimal orders: opt <= proxy <= 2 opt and q* is non-increasing") {
    Rng rng(16);
    for (int trial = 0; trial < 200; ++trial) {
      auto d = random_feasible(2 + trial % 5, 2 + trial % 5, rng);
      auto [order, opt] = brute_force_opt_order(d);
      auto out = proxy_opt_diagnostics(order, d);
      REQUIRE(out.cost == Catch::Approx(opt).margin(1e-9));
      REQUIRE(out.proxy >= opt - 1e-9);
      REQUIRE(out.proxy <= 2 * opt + 1e-9);
      for (size_t t = 1; t < out.trace.q.size(); ++t)
        REQUIRE(out.trace.q[t] <= out.trace.q[t - 1] + 1e-9);
    }
  }
  SECTION("on arbitrary orders the proxy still dominates the cost") {
    Rng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
      auto d = random_feasible(3 + trial % 4, 3, rng);
      auto order = rng.permutation(static_cast<int>(d.n()));
      auto out = proxy_opt_diagnostics(order, d);
      REQUIRE(out.proxy >= out.cost - 1e-9);
    }
  }
}

TEST_CASE("brute force optimum") {
  SECTION("point mass on a pair: both orders cost 1") {
    auto d = ScenarioDistribution::point_mass(Bits::from_ids(2, {0, 1}));
    auto [order, cost] = brute_force_opt_order(d);
    REQUIRE(cost == Catch::Approx(1.0));
  }
  SECTION("Feige instance optimum is the greedy order") {
    auto [order, cost] = brute_force_opt_order(feige_instance());
    REQUIRE(order == std::vector<int>{0, 1});
    REQUIRE(cost == Catch::Approx(4.0 / 3.0));
  }
  SECTION("greedy never beats the optimum") {
    Rng rng(18);
    for (int trial = 0; trial < 100; ++trial) {
      auto d = random_feasible(2 + trial % 5, 2 + trial % 4, rng);
      auto [order, opt] = brute_force_opt_order(d);
      REQUIRE(greedy_cost(conditional_greedy(d)) >= opt - 1e-9);
    }
  }
  SECTION("capacity cap") {
    Rng rng(19);
    auto d = random_feasible(9, 3, rng);
    REQUIRE_THROWS_AS(brute_force_opt_order(d), CapacityError);
  }
}

TEST_CASE("approximation bounds against the brute-force optimum") {
  Rng rng(20);
  SECTION("CNCP instances: factor 2") {
    int checked = 0;
    for (int trial = 0; trial < 40 && checked < 25; ++trial) {
      const int n = 3 + trial % 4;
      std::vector<double> w(n);
      for (double& v : w) v = 0.2 + rng.next_unit();
      auto d = weighted_k_subset_distribution(n, 1 + trial % 2, w);
      if (check_cncp(d).has_value()) continue;  // family should pass, but verify
      ++checked;
      auto [order, opt] = brute_force_opt_order(d);
      REQUIRE(greedy_cost(conditional_greedy(d)) <= 2 * opt + 1e-9);
    }
    REQUIRE(checked == 25);
  }
  SECTION("arbitrary instances: factor 4") {
    for (int trial = 0; trial < 150; ++trial) {
      auto d = random_feasible(3 + trial % 4, 2 + trial % 5, rng);
      auto [order, opt] = brute_force_opt_order(d);
      REQUIRE(greedy_cost(conditional_greedy(d)) <= 4 * opt + 1e-9);
    }
  }
}

TEST_CASE("k-of-n SBFE stopping rule") {
  SECTION("k = 1 with the empty scenario pays all n probes") {
    auto d = ScenarioDistribution::point_mass(Bits(3));
    REQUIRE(sbfe_order_cost({0, 1, 2}, d, 1) == Catch::Approx(3.0));
  }
  SECTION("k = n with the full scenario pays all n probes") {
    auto d = ScenarioDistribution::point_mass(Bits::full(3));
    REQUIRE(sbfe_order_cost({0, 1, 2}, d, 3) == Catch::Approx(3.0));
  }
  SECTION("mixed case by hand") {
    auto d = ScenarioDistribution::explicit_support(2, {{Bits(2), 0.5}, {Bits::from_ids(2, {0}), 0.5}});
    REQUIRE(sbfe_order_cost({0, 1}, d, 1) == Catch::Approx(1.5));
  }
  SECTION("stopping rule never exceeds n and certifies one side") {
    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
      const int n = 3 + trial % 4;
      auto d = random_feasible(n, 3, rng);
      const int k = 1 + trial % n;
      auto order = rng.permutation(n);
      const double c = sbfe_order_cost(order, d, k);
      REQUIRE(c <= n + 1e-9);
      REQUIRE(c >= 1.0 - 1e-9);
    }
  }
}
