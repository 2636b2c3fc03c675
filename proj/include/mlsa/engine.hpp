#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "mlsa/measures.hpp"
#include "mlsa/models.hpp"
#include "mlsa/rng.hpp"
#include "mlsa/samplers.hpp"

namespace mlsa {

// Step sequence gamma_n = gamma1 / (offset + n^beta), n >= 1. With offset = 0
// this is the plain gamma1 * n^(-beta) schedule; a positive offset smooths the
// early iterations without changing the decay rate.
struct StepSchedule {
  double gamma1;
  double beta = 1.0;
  double offset = 0.0;

  StepSchedule(double gamma1_, double beta_ = 1.0, double offset_ = 0.0);

  double gamma(std::int64_t n) const;

private:
  bool unit_beta_;
};

struct SARunResult {
  EstimatePair estimate;
  std::int64_t iterations = 0;
  std::int64_t inner_draws = 0;  // simulation cost in payoff/loss draws
  double wall_time_s = 0.0;
};

// Raised when a VaR iterate leaves [-1e9, 1e9] or turns non-finite.
class DivergedError : public std::runtime_error {
public:
  DivergedError(std::int64_t iteration, int level, double xi);

  std::int64_t iteration() const { return iteration_; }
  int level() const { return level_; }

private:
  std::int64_t iteration_;
  int level_;
};

using LossGenerator = std::function<double(RngStream&)>;

// Classical two-time-scale SA on direct loss draws: the VaR chain steps with
// gamma_{k+1}, the ES chain with 1/(k+1). Consumes state.stream(0).
SARunResult run_sa(const LossGenerator& loss, std::int64_t n,
                   const StepSchedule& sched, EstimatePair init,
                   const RiskLevel& level, const RngState& state);

// Same recursion driven by nested draws X_h; cost counts K inner draws per step.
SARunResult run_nested_sa(const LossModel& model, BiasParam bias, std::int64_t n,
                          const StepSchedule& sched, EstimatePair init,
                          const RngState& state);

// Multilevel telescope: an NSA chain at level 0 plus, for each level l >= 1,
// a coarse and a fine chain driven by the same coupled pairs. Level l consumes
// state.stream(l), so the estimate does not depend on execution order.
// `inits` must have L+1 entries (both chains of a level share one init).
SARunResult run_mlsa(const LossModel& model, const LevelLadder& ladder,
                     const std::vector<std::int64_t>& budgets,
                     const StepSchedule& sched,
                     const std::vector<EstimatePair>& inits,
                     const RngState& state);

// Convenience overload with all-zero initializations.
SARunResult run_mlsa(const LossModel& model, const LevelLadder& ladder,
                     const std::vector<std::int64_t>& budgets,
                     const StepSchedule& sched, const RngState& state);

}  // namespace mlsa
