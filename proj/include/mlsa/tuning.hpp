#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "mlsa/samplers.hpp"

namespace mlsa {

// Weak-error regime governing the VaR level weights eps(h).
struct Scenario {
  enum class Kind { FiniteMoment, GaussianConcentration, LipschitzConditionalCdf };

  Kind kind;
  double p_star = 0.0;  // only meaningful for FiniteMoment

  static Scenario finite_moment(double p_star);
  static Scenario gaussian();
  static Scenario lipschitz();
};

// Per-level iteration budgets plus the ladder they apply to. `calibration`
// is the user-facing stand-in for the model-dependent constant (default 1).
struct Allocation {
  LevelLadder levels;
  std::vector<std::int64_t> budgets;  // N_0..N_L
  double calibration = 1.0;
  bool clamped = false;      // some budget was raised to 1
  bool nonmonotone = false;  // budgets are not non-increasing

  // Total simulation cost sum_l N_l / h_l in inner draws.
  std::int64_t cost() const;
};

// Nested-SA tuning for accuracy eps: K = ceil(1/eps), n = ceil(eps^(-2/beta)).
std::pair<BiasParam, std::int64_t> nsa_tuning(double epsilon, double beta);

// Number of geometric levels needed so that h_L <= eps; requires h0 > eps.
int level_count(BiasParam h0, int m, double epsilon);

// Scenario-dependent level weight eps(h).
double eps_of_h(double h, const Scenario& s);

// VaR-focused per-level budgets (general-beta display). Budgets are emitted
// verbatim from the formula; non-monotone outputs are flagged, not repaired.
Allocation var_allocation(double epsilon, double beta, const LevelLadder& ladder,
                          const Scenario& s, double gamma1, double calibration);

// ES-focused budgets N_l = ceil(calibration * eps^-2 * L * h_l), beta = 1
// forced; zero budgets (L = 0) are clamped to 1 and flagged.
Allocation es_allocation(double epsilon, const LevelLadder& ladder,
                         double calibration);

}  // namespace mlsa
