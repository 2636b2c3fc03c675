#include "mlsa/tuning.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mlsa {

namespace {

std::int64_t checked_ceil(double x, const char* what) {
  if (!(x >= 0.0) || x > 9.0e18)
    throw std::invalid_argument(std::string(what) + ": budget out of range");
  return static_cast<std::int64_t>(std::ceil(x));
}

}  // namespace

Scenario Scenario::finite_moment(double p_star) {
  if (!(p_star > 1.0))
    throw std::invalid_argument("Scenario: finite-moment order p must exceed 1");
  return {Kind::FiniteMoment, p_star};
}

Scenario Scenario::gaussian() { return {Kind::GaussianConcentration, 0.0}; }
Scenario Scenario::lipschitz() { return {Kind::LipschitzConditionalCdf, 0.0}; }

std::int64_t Allocation::cost() const {
  std::int64_t total = 0;
  for (int ell = 0; ell <= levels.l; ell++)
    total += budgets[static_cast<std::size_t>(ell)] * levels.inner_count(ell);
  return total;
}

std::pair<BiasParam, std::int64_t> nsa_tuning(double epsilon, double beta) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("nsa_tuning: epsilon must lie in (0,1)");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("nsa_tuning: beta must lie in (0,1]");
  auto k = checked_ceil(1.0 / epsilon, "nsa_tuning");
  auto n = checked_ceil(std::pow(epsilon, -2.0 / beta), "nsa_tuning");
  return {BiasParam(k), n};
}

int level_count(BiasParam h0, int m, double epsilon) {
  if (m < 2) throw std::invalid_argument("level_count: need M >= 2");
  if (!(epsilon > 0.0))
    throw std::invalid_argument("level_count: epsilon must be positive");
  double h = h0.h();
  if (!(h > epsilon))
    throw std::invalid_argument(
        "level_count: requires h0 > epsilon; raise h0 (smaller K) or use NSA");
  int l = static_cast<int>(std::ceil(std::log(h / epsilon) / std::log(m) - 1e-9));
  if (l < 1) l = 1;
  // settle fp edge cases: smallest L with h0 / M^L <= epsilon
  while (h / std::pow(m, l) > epsilon) l++;
  while (l > 1 && h / std::pow(m, l - 1) <= epsilon) l--;
  return l;
}

double eps_of_h(double h, const Scenario& s) {
  if (!(h > 0.0 && h <= 1.0))
    throw std::invalid_argument("eps_of_h: h must lie in (0,1]");
  switch (s.kind) {
    case Scenario::Kind::FiniteMoment:
      return std::pow(h, s.p_star / (2.0 * (1.0 + s.p_star)));
    case Scenario::Kind::GaussianConcentration:
      return std::sqrt(h) * std::sqrt(std::abs(std::log(h)));
    case Scenario::Kind::LipschitzConditionalCdf:
      return std::sqrt(h);
  }
  throw std::logic_error("eps_of_h: unknown scenario");
}

Allocation var_allocation(double epsilon, double beta, const LevelLadder& ladder,
                          const Scenario& s, double gamma1, double calibration) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("var_allocation: epsilon must lie in (0,1)");
  if (!(beta > 0.0 && beta <= 1.0))
    throw std::invalid_argument("var_allocation: beta must lie in (0,1]");
  if (!(gamma1 > 0.0) || !(calibration > 0.0))
    throw std::invalid_argument("var_allocation: gamma1 and calibration must be positive");

  double q = 1.0 / (1.0 + beta);
  double weight_sum = 0.0;
  for (int ell = 0; ell <= ladder.l; ell++) {
    double h = ladder.h(ell);
    weight_sum += std::pow(h, -beta * q) * std::pow(eps_of_h(h, s), q);
  }
  double prefactor = std::pow(calibration * gamma1, 1.0 / beta) *
                     std::pow(epsilon, -2.0 / beta) *
                     std::pow(weight_sum, 1.0 / beta);

  Allocation alloc{ladder, {}, calibration, false, false};
  alloc.budgets.reserve(static_cast<std::size_t>(ladder.l) + 1);
  for (int ell = 0; ell <= ladder.l; ell++) {
    double h = ladder.h(ell);
    double raw = prefactor * std::pow(h, q) * std::pow(eps_of_h(h, s), q);
    std::int64_t n = checked_ceil(raw, "var_allocation");
    if (n < 1) {
      n = 1;
      alloc.clamped = true;
    }
    alloc.budgets.push_back(n);
  }
  for (std::size_t i = 1; i < alloc.budgets.size(); i++)
    if (alloc.budgets[i] > alloc.budgets[i - 1]) alloc.nonmonotone = true;
  return alloc;
}

Allocation es_allocation(double epsilon, const LevelLadder& ladder,
                         double calibration) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("es_allocation: epsilon must lie in (0,1)");
  if (!(calibration > 0.0))
    throw std::invalid_argument("es_allocation: calibration must be positive");

  double pre = calibration / (epsilon * epsilon) * static_cast<double>(ladder.l);
  Allocation alloc{ladder, {}, calibration, false, false};
  alloc.budgets.reserve(static_cast<std::size_t>(ladder.l) + 1);
  for (int ell = 0; ell <= ladder.l; ell++) {
    std::int64_t n = checked_ceil(pre * ladder.h(ell), "es_allocation");
    if (n < 1) {
      n = 1;
      alloc.clamped = true;
    }
    alloc.budgets.push_back(n);
  }
  for (std::size_t i = 1; i < alloc.budgets.size(); i++)
    if (alloc.budgets[i] > alloc.budgets[i - 1]) alloc.nonmonotone = true;
  return alloc;
}

}  // namespace mlsa
