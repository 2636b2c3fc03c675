#include <doctest.h>

#include <cmath>
#include <vector>

#include "mlsa/bench.hpp"
#include "mlsa/tuning.hpp"

using namespace mlsa;

TEST_CASE("nested tuning pairs") {
  auto [b1, n1] = nsa_tuning(0.1, 1.0);
  CHECK(b1.k == 10);
  CHECK(n1 == 100);
  auto [b2, n2] = nsa_tuning(1.0 / 32.0, 1.0);
  CHECK(b2.k == 32);
  CHECK(n2 == 1024);
  auto [b3, n3] = nsa_tuning(0.1, 0.5);
  CHECK(b3.k == 10);
  CHECK(n3 == 10000);
  CHECK_THROWS_AS(nsa_tuning(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(nsa_tuning(1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(nsa_tuning(0.5, 1.5), std::invalid_argument);
}

TEST_CASE("level count and its bracket invariant") {
  CHECK(level_count(BiasParam(32), 2, 1.0 / 128.0) == 2);
  CHECK(level_count(BiasParam(16), 2, 1.0 / 128.0) == 3);
  CHECK(level_count(BiasParam(16), 2, 1.0 / 512.0) == 5);
  CHECK(level_count(BiasParam(8), 2, 1.0 / 32.0) == 2);
  CHECK_THROWS_AS(level_count(BiasParam(2), 2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(level_count(BiasParam(4), 2, 0.3), std::invalid_argument);

  for (int k : {2, 3, 5, 16, 37}) {
    for (double eps : {0.21, 0.11, 0.034, 0.008, 0.0011}) {
      double h0 = 1.0 / k;
      if (!(h0 > eps)) continue;
      for (int m : {2, 3, 4}) {
        int l = level_count(BiasParam(k), m, eps);
        CHECK(h0 / std::pow(m, l) <= eps);
        if (l >= 1) CHECK(h0 / std::pow(m, l - 1) > eps);
      }
    }
  }
}

TEST_CASE("scenario level weights") {
  CHECK(eps_of_h(0.25, Scenario::lipschitz()) == doctest::Approx(0.5));
  CHECK(eps_of_h(0.25, Scenario::gaussian()) ==
        doctest::Approx(0.5887050112577373).epsilon(1e-13));
  CHECK(eps_of_h(std::pow(2.0, -10), Scenario::finite_moment(11.0)) ==
        doctest::Approx(0.041713745442813574).epsilon(1e-13));
  CHECK(eps_of_h(1.0, Scenario::gaussian()) == doctest::Approx(0.0));
  CHECK_THROWS_AS(eps_of_h(0.0, Scenario::lipschitz()), std::invalid_argument);
  CHECK_THROWS_AS(eps_of_h(1.5, Scenario::lipschitz()), std::invalid_argument);
  CHECK_THROWS_AS(Scenario::finite_moment(1.0), std::invalid_argument);

  // nondecreasing in h on (0, 1/e]
  for (auto s : {Scenario::finite_moment(3.0), Scenario::gaussian(),
                 Scenario::lipschitz()}) {
    double prev = 0.0;
    for (double h = 1e-6; h <= 0.36; h *= 2.0) {
      double v = eps_of_h(h, s);
      CHECK(v >= prev);
      prev = v;
    }
  }
  // large-p finite-moment limit approaches the Lipschitz branch
  CHECK(eps_of_h(0.01, Scenario::finite_moment(1e9)) ==
        doctest::Approx(0.1).epsilon(1e-6));
}

TEST_CASE("VaR allocation collapses at a single unit level") {
  LevelLadder flat(BiasParam(1), 2, 0);
  for (double eps : {0.25, 0.1, 0.03}) {
    Allocation a = var_allocation(eps, 1.0, flat, Scenario::lipschitz(), 1.0, 1.0);
    CHECK(a.budgets.size() == 1);
    CHECK(a.budgets[0] == (std::int64_t)std::ceil(1.0 / (eps * eps)));
    CHECK(a.cost() == a.budgets[0]);
  }
}

TEST_CASE("VaR allocation matches the independently evaluated formula") {
  // eps=1/32, beta=1, M=2, h0=1/16, L=1, finite-moment p=11, gamma1=1, cal=1:
  // raw budgets 634.0397 and 382.4859 before the ceiling
  LevelLadder lad(BiasParam(16), 2, 1);
  Allocation a = var_allocation(1.0 / 32.0, 1.0, lad, Scenario::finite_moment(11.0),
                                1.0, 1.0);
  REQUIRE(a.budgets.size() == 2);
  CHECK(a.budgets[0] == 635);
  CHECK(a.budgets[1] == 383);
  CHECK(a.cost() == 635 * 16 + 383 * 32);
  CHECK_FALSE(a.nonmonotone);
}

TEST_CASE("VaR allocation budget decay rate under the Lipschitz scenario") {
  LevelLadder lad(BiasParam(4), 2, 5);
  Allocation a = var_allocation(0.01, 1.0, lad, Scenario::lipschitz(), 1.0, 1.0);
  // N_l proportional to h_l^{3/4}: successive ratios near 2^{3/4}
  for (std::size_t i = 1; i < a.budgets.size(); i++) {
    double ratio = (double)a.budgets[i - 1] / (double)a.budgets[i];
    CHECK(ratio == doctest::Approx(std::pow(2.0, 0.75)).epsilon(0.02));
  }
}

TEST_CASE("ES allocation values, decay, and clamping") {
  LevelLadder lad(BiasParam(1), 2, 2);
  Allocation a = es_allocation(0.125, lad, 1.0);
  REQUIRE(a.budgets.size() == 3);
  CHECK(a.budgets[0] == 128);  // 64 * 2 * 1
  CHECK(a.budgets[1] == 64);
  CHECK(a.budgets[2] == 32);  // 64 * 2 * 0.25
  CHECK_FALSE(a.clamped);

  LevelLadder flat(BiasParam(1), 2, 0);
  Allocation z = es_allocation(0.125, flat, 1.0);
  CHECK(z.budgets[0] == 1);  // L=0 would yield 0; clamped
  CHECK(z.clamped);
}

TEST_CASE("allocation functions are pure") {
  LevelLadder lad(BiasParam(16), 2, 3);
  Allocation a = var_allocation(0.01, 1.0, lad, Scenario::finite_moment(11.0), 2.0, 0.5);
  Allocation b = var_allocation(0.01, 1.0, lad, Scenario::finite_moment(11.0), 2.0, 0.5);
  CHECK(a.budgets == b.budgets);
  Allocation c = es_allocation(0.01, lad, 0.5);
  Allocation d = es_allocation(0.01, lad, 0.5);
  CHECK(c.budgets == d.budgets);
}

TEST_CASE("allocation cost slopes track the complexity exponents") {
  // With the ladder held fixed, both allocations scale exactly like eps^-2.
  LevelLadder fixed(BiasParam(1), 2, 6);
  std::vector<double> grid, var_costs, es_costs;
  for (int e = 7; e <= 12; e++) {
    double eps = std::pow(2.0, -e);
    grid.push_back(eps);
    var_costs.push_back((double)var_allocation(eps, 1.0, fixed,
                                               Scenario::finite_moment(11.0), 1.0, 1.0)
                            .cost());
    es_costs.push_back((double)es_allocation(eps, fixed, 1.0).cost());
  }
  CHECK(fit_loglog_slope(grid, var_costs).slope == doctest::Approx(-2.0).epsilon(0.01));
  CHECK(fit_loglog_slope(grid, es_costs).slope == doctest::Approx(-2.0).epsilon(0.01));

  // With L chosen by level_count the extra level factors steepen the discrete
  // fit; over a wide grid it approaches the asymptotic exponents
  // (-3 + p/(2(1+p)) = -2.5417 for p = 11, and -2 - o(1) with the |ln eps|^2
  // factor for the ES branch).
  grid.clear();
  var_costs.clear();
  es_costs.clear();
  for (int e = 5; e <= 14; e++) {
    double eps = std::pow(2.0, -e);
    int l = level_count(BiasParam(1), 2, eps);
    LevelLadder lad(BiasParam(1), 2, l);
    grid.push_back(eps);
    var_costs.push_back((double)var_allocation(eps, 1.0, lad,
                                               Scenario::finite_moment(11.0), 1.0, 1.0)
                            .cost());
    es_costs.push_back((double)es_allocation(eps, lad, 1.0).cost());
  }
  SlopeFit v = fit_loglog_slope(grid, var_costs);
  CHECK(v.slope > -2.80);
  CHECK(v.slope < -2.54);
  SlopeFit es = fit_loglog_slope(grid, es_costs);
  CHECK(es.slope > -2.4);
  CHECK(es.slope < -2.0);
}
