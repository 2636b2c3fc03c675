#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mlsa/measures.hpp"
#include "mlsa/rng.hpp"

namespace mlsa {

// A loss of the form X0 = E[phi(Y, Z) | Y] with independent factors Y, Z.
// Models are immutable after construction; all randomness flows through the
// caller's stream. Inner sampling is batched (one virtual call accumulates
// `count` payoffs) to keep dispatch out of the hot loop.
class LossModel {
public:
  virtual ~LossModel() = default;

  virtual double draw_outer(RngStream& rng) const = 0;

  // Compensated sum of `count` payoffs phi(outer, Z) over fresh inner draws.
  virtual double payoff_sum(double outer, std::int64_t count, RngStream& rng) const = 0;

  // Maps a mean payoff to the loss aggregate the SA schemes consume.
  virtual double loss_from_mean_payoff(double mean_payoff) const = 0;

  virtual bool has_exact_loss() const { return false; }
  virtual double draw_exact_loss(RngStream& rng) const;

  virtual std::optional<EstimatePair> analytic_truth() const { return std::nullopt; }

  virtual const RiskLevel& risk_level() const = 0;
  virtual std::string name() const = 0;
};

// ----------------------------------------------------------------------------
// Option case study: quadratic payoff on a Brownian motion observed at a
// horizon delta, loss X0 = delta(Y^2 - 1) with Y standard normal.

struct OptionParams {
  double delta;      // time horizon in (0,1)
  RiskLevel level;

  OptionParams(double delta_, RiskLevel level_);
};

double option_phi(double y, double z, const OptionParams& p);
double option_exact_loss(double y, const OptionParams& p);
EstimatePair option_truth(const OptionParams& p);

class OptionModel final : public LossModel {
public:
  explicit OptionModel(OptionParams p);

  double draw_outer(RngStream& rng) const override { return rng.normal(); }
  double payoff_sum(double outer, std::int64_t count, RngStream& rng) const override;
  double loss_from_mean_payoff(double mean_payoff) const override {
    return -1.0 - mean_payoff;
  }
  bool has_exact_loss() const override { return true; }
  double draw_exact_loss(RngStream& rng) const override;
  std::optional<EstimatePair> analytic_truth() const override;
  const RiskLevel& risk_level() const override { return params_.level; }
  std::string name() const override { return "option"; }

  const OptionParams& params() const { return params_; }

private:
  OptionParams params_;
  double sqrt_delta_;
  double sqrt_one_minus_delta_;
};

// ----------------------------------------------------------------------------
// Swap case study: short position on an at-par swap over a Black-Scholes rate,
// revalued at horizon delta. Losses are reported in basis points of the leg
// value (each leg is worth one unit of 1e-4 at inception).

struct SwapParams {
  double r;                // risk-free rate (per annum)
  double s0;               // initial rate
  double kappa;            // risk-neutral drift
  double sigma;            // volatility
  double coupon_interval;  // uniform coupon spacing (years, 30/360)
  double maturity;         // final coupon date (years)
  double horizon;          // risk horizon delta (years), < coupon_interval
  RiskLevel level;

  SwapParams(double r_, double s0_, double kappa_, double sigma_,
             double coupon_interval_, double maturity_, double horizon_,
             RiskLevel level_);

  // Derived quantities, precomputed at construction.
  int coupon_count() const { return d_; }
  const std::vector<double>& coupon_dates() const { return dates_; }
  double annuity() const { return annuity_; }
  double par_strike() const { return strike_; }
  double nominal() const { return nominal_; }
  double loss_scale() const { return loss_scale_; }  // nominal * annuity * s0

  // Swap value at inception under the par strike; zero up to rounding.
  double par_value() const;

  // Discounted weight rho_{T_i} * Delta_i * exp(kappa * T_{i-1}), 1-based i.
  double weight(int i) const { return weights_[static_cast<std::size_t>(i) - 1]; }

private:
  int d_;
  std::vector<double> dates_;    // T_1..T_d
  std::vector<double> weights_;  // w_1..w_d
  double annuity_;
  double strike_;
  double nominal_;
  double loss_scale_;
};

double swap_par_strike(const SwapParams& p);
double swap_annuity(const SwapParams& p);
double swap_nominal(const SwapParams& p);
EstimatePair swap_truth(const SwapParams& p);

// phi(y, z) with y the horizon ratio factor and z the d-1 coupon-period
// ratio factors.
double swap_phi(double y, std::span<const double> z, const SwapParams& p);

// Direct loss from a single standard normal draw u.
double swap_exact_loss(double u, const SwapParams& p);

class SwapModel final : public LossModel {
public:
  explicit SwapModel(SwapParams p);

  double draw_outer(RngStream& rng) const override;
  double payoff_sum(double outer, std::int64_t count, RngStream& rng) const override;
  double loss_from_mean_payoff(double mean_payoff) const override {
    return mean_payoff;
  }
  bool has_exact_loss() const override { return true; }
  double draw_exact_loss(RngStream& rng) const override;
  std::optional<EstimatePair> analytic_truth() const override;
  const RiskLevel& risk_level() const override { return params_.level; }
  std::string name() const override { return "swap"; }

  const SwapParams& params() const { return params_; }

private:
  SwapParams params_;
  // Per-period lognormal factor parameters: Z_1 spans [delta, T_1], the rest
  // span full coupon periods.
  std::vector<double> z_drift_;
  std::vector<double> z_vol_;
  double y_drift_;
  double y_vol_;
};

}  // namespace mlsa
