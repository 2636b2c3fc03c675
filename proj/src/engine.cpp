#include "mlsa/engine.hpp"

#include <cassert>
#include <chrono>
#include <cmath>

namespace mlsa {

namespace {

constexpr double kDivergenceBound = 1e9;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// One two-time-scale iterate: VaR chain on gamma, ES chain on 1/(k+1).
struct Chain {
  double xi;
  double chi;

  void step(double x, double g, std::int64_t k, const RiskLevel& level) {
    double xi_next = xi - g * h1(xi, x, level);
    assert(std::abs(xi_next - xi) <= level.k_alpha() * g * (1.0 + 1e-12));
    chi -= h2(xi, chi, x, level) / static_cast<double>(k + 1);
    xi = xi_next;
  }

  bool diverged() const { return !(std::abs(xi) <= kDivergenceBound); }
};

EstimatePair run_chain(const LossGenerator& loss, std::int64_t n,
                       const StepSchedule& sched, EstimatePair init,
                       const RiskLevel& level, RngStream& rng, int tag) {
  Chain c{init.xi, init.chi};
  for (std::int64_t k = 0; k < n; k++) {
    double x = loss(rng);
    c.step(x, sched.gamma(k + 1), k, level);
    if (c.diverged()) throw DivergedError(k + 1, tag, c.xi);
  }
  return {c.xi, c.chi};
}

}  // namespace

StepSchedule::StepSchedule(double gamma1_, double beta_, double offset_)
    : gamma1(gamma1_), beta(beta_), offset(offset_), unit_beta_(beta_ == 1.0) {
  if (!(gamma1 > 0.0))
    throw std::invalid_argument("StepSchedule: gamma1 must be positive");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("StepSchedule: beta must lie in (0,1]");
  if (!(offset >= 0.0))
    throw std::invalid_argument("StepSchedule: offset must be nonnegative");
}

double StepSchedule::gamma(std::int64_t n) const {
  double nb = unit_beta_ ? static_cast<double>(n)
                         : std::pow(static_cast<double>(n), beta);
  return gamma1 / (offset + nb);
}

DivergedError::DivergedError(std::int64_t iteration, int level, double xi)
    : std::runtime_error("SA iterate diverged at iteration " +
                         std::to_string(iteration) + " (level " +
                         std::to_string(level) + ", xi=" + std::to_string(xi) + ")"),
      iteration_(iteration),
      level_(level) {}

SARunResult run_sa(const LossGenerator& loss, std::int64_t n,
                   const StepSchedule& sched, EstimatePair init,
                   const RiskLevel& level, const RngState& state) {
  if (n < 1) throw std::invalid_argument("run_sa: need n >= 1");
  if (!init.finite()) throw std::invalid_argument("run_sa: init must be finite");
  auto t0 = std::chrono::steady_clock::now();
  RngStream rng = state.stream(0);
  EstimatePair est = run_chain(loss, n, sched, init, level, rng, 0);
  return {est, n, n, seconds_since(t0)};
}

SARunResult run_nested_sa(const LossModel& model, BiasParam bias, std::int64_t n,
                          const StepSchedule& sched, EstimatePair init,
                          const RngState& state) {
  if (n < 1) throw std::invalid_argument("run_nested_sa: need n >= 1");
  if (!init.finite()) throw std::invalid_argument("run_nested_sa: init must be finite");
  auto t0 = std::chrono::steady_clock::now();
  RngStream rng = state.stream(0);
  LossGenerator gen = [&model, bias](RngStream& r) {
    return sample_nested(model, bias, r);
  };
  EstimatePair est = run_chain(gen, n, sched, init, model.risk_level(), rng, 0);
  return {est, n, n * bias.k, seconds_since(t0)};
}

SARunResult run_mlsa(const LossModel& model, const LevelLadder& ladder,
                     const std::vector<std::int64_t>& budgets,
                     const StepSchedule& sched,
                     const std::vector<EstimatePair>& inits,
                     const RngState& state) {
  std::size_t levels = static_cast<std::size_t>(ladder.l) + 1;
  if (budgets.size() != levels)
    throw std::invalid_argument("run_mlsa: need one budget per level 0..L");
  if (inits.size() != levels)
    throw std::invalid_argument("run_mlsa: need one init per level 0..L");
  for (std::int64_t b : budgets)
    if (b < 1) throw std::invalid_argument("run_mlsa: budgets must be >= 1");
  for (const EstimatePair& p : inits)
    if (!p.finite()) throw std::invalid_argument("run_mlsa: inits must be finite");

  auto t0 = std::chrono::steady_clock::now();
  const RiskLevel& level = model.risk_level();

  // Level 0: plain NSA chain at bias h0.
  std::int64_t cost = budgets[0] * ladder.h0.k;
  RngStream rng0 = state.stream(0);
  LossGenerator gen0 = [&model, &ladder](RngStream& r) {
    return sample_nested(model, ladder.h0, r);
  };
  EstimatePair total = run_chain(gen0, budgets[0], sched, inits[0], level, rng0, 0);

  // Levels 1..L: coarse and fine chains on shared coupled pairs; the
  // telescoped correction is (fine chain) - (coarse chain).
  for (int ell = 1; ell <= ladder.l; ell++) {
    std::int64_t n = budgets[static_cast<std::size_t>(ell)];
    cost += n * ladder.inner_count(ell);
    RngStream rng = state.stream(static_cast<std::uint64_t>(ell));
    EstimatePair init = inits[static_cast<std::size_t>(ell)];
    Chain coarse{init.xi, init.chi};
    Chain fine{init.xi, init.chi};
    for (std::int64_t k = 0; k < n; k++) {
      auto [xc, xf] = sample_coupled_pair(model, ladder, ell, rng);
      double g = sched.gamma(k + 1);
      coarse.step(xc, g, k, level);
      fine.step(xf, g, k, level);
      if (coarse.diverged()) throw DivergedError(k + 1, ell, coarse.xi);
      if (fine.diverged()) throw DivergedError(k + 1, ell, fine.xi);
    }
    total.xi += fine.xi - coarse.xi;
    total.chi += fine.chi - coarse.chi;
  }

  std::int64_t iterations = 0;
  for (std::int64_t b : budgets) iterations += b;
  return {total, iterations, cost, seconds_since(t0)};
}

SARunResult run_mlsa(const LossModel& model, const LevelLadder& ladder,
                     const std::vector<std::int64_t>& budgets,
                     const StepSchedule& sched, const RngState& state) {
  std::vector<EstimatePair> inits(static_cast<std::size_t>(ladder.l) + 1);
  return run_mlsa(model, ladder, budgets, sched, inits, state);
}

}  // namespace mlsa
