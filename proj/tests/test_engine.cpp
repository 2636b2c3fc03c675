#include <doctest.h>

#include <cmath>
#include <vector>

#include "mlsa/engine.hpp"

using namespace mlsa;

namespace {
const OptionParams kOption(0.5, RiskLevel(0.975));
}

TEST_CASE("step schedule values and validation") {
  StepSchedule s(2.0, 1.0, 100.0);
  CHECK(s.gamma(1) == doctest::Approx(2.0 / 101.0));
  CHECK(s.gamma(900) == doctest::Approx(2.0 / 1000.0));
  StepSchedule half(1.0, 0.5, 0.0);
  CHECK(half.gamma(4) == doctest::Approx(0.5));
  CHECK(half.gamma(100) == doctest::Approx(0.1));
  CHECK_THROWS_AS(StepSchedule(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule(1.0, 1.5), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule(1.0, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("single-step ES identity") {
  RiskLevel lv(0.975);
  double x_val = 3.7;
  LossGenerator gen = [&](RngStream&) { return x_val; };
  EstimatePair init{1.0, 0.0};
  SARunResult r = run_sa(gen, 1, StepSchedule(0.25), init, lv, RngState(0));
  // chi_1 = xi_0 + (X - xi_0)^+ / (1 - alpha), whatever gamma is
  CHECK(r.estimate.chi == doctest::Approx(1.0 + (3.7 - 1.0) * 40.0).epsilon(1e-14));
  CHECK(r.iterations == 1);
  CHECK(r.inner_draws == 1);
}

TEST_CASE("constant zero stream is a fixed point at the median") {
  RiskLevel lv(0.5);
  LossGenerator gen = [](RngStream&) { return 0.0; };
  SARunResult r = run_sa(gen, 5000, StepSchedule(1.0, 1.0, 10.0), {}, lv, RngState(0));
  // H1(xi, 0) flips sign around 0, so xi oscillates within the step size
  CHECK(std::abs(r.estimate.xi) <= 1.0);
  CHECK(std::abs(r.estimate.chi) < 0.01);
}

TEST_CASE("ES chain equals the running mean of the objective integrand") {
  RiskLevel lv(0.9);
  std::vector<double> draws;
  LossGenerator gen = [&](RngStream& rng) {
    double x = rng.normal();
    draws.push_back(x);
    return x;
  };
  StepSchedule sched(1.0, 1.0, 10.0);
  const std::int64_t n = 2000;
  SARunResult r = run_sa(gen, n, sched, {}, lv, RngState(314));

  // replay the VaR chain and average the integrands
  double xi = 0.0, acc = 0.0;
  for (std::int64_t k = 0; k < n; k++) {
    double x = draws[(std::size_t)k];
    acc += xi + std::max(x - xi, 0.0) * lv.inv_tail();
    xi -= sched.gamma(k + 1) * h1(xi, x, lv);
  }
  CHECK(r.estimate.chi ==
        doctest::Approx(acc / (double)n).epsilon(1e-10));
  CHECK(r.estimate.xi == doctest::Approx(xi).epsilon(1e-14));
}

TEST_CASE("divergence guard reports the offending iteration") {
  RiskLevel lv(0.975);
  LossGenerator gen = [](RngStream&) { return 1e300; };
  StepSchedule sched(1e9, 1.0, 0.0);
  try {
    run_sa(gen, 100, sched, {}, lv, RngState(0));
    FAIL("expected divergence");
  } catch (const DivergedError& e) {
    CHECK(e.iteration() == 1);
    CHECK(e.level() == 0);
  }
}

TEST_CASE("NSA with K=1 equals SA on the single-payoff aggregate") {
  OptionModel model(kOption);
  StepSchedule sched(1.0, 1.0, 100.0);
  RngState state(42);
  SARunResult nsa = run_nested_sa(model, BiasParam(1), 5000, sched, {}, state);
  LossGenerator gen = [&model](RngStream& rng) {
    double y = model.draw_outer(rng);
    return model.loss_from_mean_payoff(model.payoff_sum(y, 1, rng));
  };
  SARunResult sa = run_sa(gen, 5000, sched, {}, model.risk_level(), state);
  CHECK(nsa.estimate.xi == sa.estimate.xi);
  CHECK(nsa.estimate.chi == sa.estimate.chi);
}

TEST_CASE("MLSA with L=0 collapses to NSA bit-exactly") {
  OptionModel model(kOption);
  StepSchedule sched(1.0, 1.0, 100.0);
  RngState state(43);
  LevelLadder lad(BiasParam(4), 2, 0);
  SARunResult ml = run_mlsa(model, lad, {3000}, sched, state);
  SARunResult nsa = run_nested_sa(model, BiasParam(4), 3000, sched, {}, state);
  CHECK(ml.estimate.xi == nsa.estimate.xi);
  CHECK(ml.estimate.chi == nsa.estimate.chi);
  CHECK(ml.inner_draws == nsa.inner_draws);
}

TEST_CASE("MLSA cost accounting is exact and the telescope splits by level") {
  OptionModel model(kOption);
  StepSchedule sched(1.0, 1.0, 100.0);
  RngState state(44);
  LevelLadder lad(BiasParam(2), 2, 2);
  std::vector<std::int64_t> budgets{1000, 400, 150};
  SARunResult ml = run_mlsa(model, lad, budgets, sched, state);
  CHECK(ml.inner_draws == 1000 * 2 + 400 * 4 + 150 * 8);
  CHECK(ml.iterations == 1550);

  // level 0 contribution is reproducible through the same keyed stream
  SARunResult base = run_nested_sa(model, BiasParam(2), 1000, sched, {}, state);
  // corrections use streams 1..L, so re-running a sub-ladder that only spans
  // levels 0..1 must leave level-1 draws identical
  std::vector<std::int64_t> sub{1000, 400};
  LevelLadder sub_lad(BiasParam(2), 2, 1);
  SARunResult ml01 = run_mlsa(model, sub_lad, sub, sched, state);
  SARunResult ml01_again = run_mlsa(model, sub_lad, sub, sched, state);
  CHECK(ml01.estimate.xi == ml01_again.estimate.xi);
  // adding level 2 does not change the level-0/1 contributions
  double level2_xi = ml.estimate.xi - ml01.estimate.xi;
  SARunResult ml_again = run_mlsa(model, lad, budgets, sched, state);
  CHECK(ml_again.estimate.xi - ml01.estimate.xi ==
        doctest::Approx(level2_xi).epsilon(1e-15));
  (void)base;
}

TEST_CASE("engine validates inputs") {
  OptionModel model(kOption);
  StepSchedule sched(1.0);
  CHECK_THROWS_AS(run_nested_sa(model, BiasParam(1), 0, sched, {}, RngState(0)),
                  std::invalid_argument);
  LevelLadder lad(BiasParam(1), 2, 1);
  CHECK_THROWS_AS(run_mlsa(model, lad, {10}, sched, RngState(0)),
                  std::invalid_argument);  // budget count mismatch
  CHECK_THROWS_AS(run_mlsa(model, lad, {10, 0}, sched, RngState(0)),
                  std::invalid_argument);  // zero budget
}

TEST_CASE("SA converges to the option benchmarks") {
  OptionModel model(kOption);
  LossGenerator gen = [&model](RngStream& rng) {
    return model.draw_exact_loss(rng);
  };
  StepSchedule sched(1.0, 1.0, 100.0);
  const int reps = 20;
  double xi_bar = 0.0, chi_bar = 0.0;
  for (int rep = 0; rep < reps; rep++) {
    SARunResult r = run_sa(gen, 200000, sched, {}, model.risk_level(),
                           RngState(1000).with_replication((std::uint64_t)rep));
    xi_bar += r.estimate.xi;
    chi_bar += r.estimate.chi;
  }
  xi_bar /= reps;
  chi_bar /= reps;
  CHECK(xi_bar == doctest::Approx(2.0119430936574445).epsilon(0.02));
  CHECK(chi_bar == doctest::Approx(2.9011282550813424).epsilon(0.02));
}
