#include "mlsa/models.hpp"

#include <cmath>
#include <stdexcept>

namespace mlsa {

namespace {

// Reported swap losses are in basis points of the at-par leg value.
constexpr double kBasisPointScale = 1e4;

struct KahanSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double v) {
    double y = v - carry;
    double t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

double LossModel::draw_exact_loss(RngStream&) const {
  throw std::logic_error("LossModel: no direct loss simulator available");
}

// ---------------------------------------------------------------------------
// Option model

OptionParams::OptionParams(double delta_, RiskLevel level_)
    : delta(delta_), level(level_) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("OptionParams: delta must lie in (0,1)");
}

double option_phi(double y, double z, const OptionParams& p) {
  double w = std::sqrt(p.delta) * y + std::sqrt(1.0 - p.delta) * z;
  return -w * w;
}

double option_exact_loss(double y, const OptionParams& p) {
  return p.delta * (y * y - 1.0);
}

EstimatePair option_truth(const OptionParams& p) {
  double tail = p.level.tail();
  double q = std_normal_inv_cdf(0.5 * tail);
  double xi = p.delta * (q * q - 1.0);
  double mu = std::sqrt(1.0 + xi / p.delta);
  double chi = 2.0 * p.delta / tail *
               (mu * std_normal_pdf(mu) + std_normal_cdf(-mu) - 0.5 * tail);
  return {xi, chi};
}

OptionModel::OptionModel(OptionParams p)
    : params_(p),
      sqrt_delta_(std::sqrt(p.delta)),
      sqrt_one_minus_delta_(std::sqrt(1.0 - p.delta)) {}

double OptionModel::payoff_sum(double outer, std::int64_t count, RngStream& rng) const {
  double ys = sqrt_delta_ * outer;
  KahanSum acc;
  for (std::int64_t k = 0; k < count; k++) {
    double w = ys + sqrt_one_minus_delta_ * rng.normal();
    acc.add(-w * w);
  }
  return acc.sum;
}

double OptionModel::draw_exact_loss(RngStream& rng) const {
  return option_exact_loss(rng.normal(), params_);
}

std::optional<EstimatePair> OptionModel::analytic_truth() const {
  return option_truth(params_);
}

// ---------------------------------------------------------------------------
// Swap model

SwapParams::SwapParams(double r_, double s0_, double kappa_, double sigma_,
                       double coupon_interval_, double maturity_, double horizon_,
                       RiskLevel level_)
    : r(r_), s0(s0_), kappa(kappa_), sigma(sigma_),
      coupon_interval(coupon_interval_), maturity(maturity_), horizon(horizon_),
      level(level_) {
  if (!(s0 > 0.0)) throw std::invalid_argument("SwapParams: s0 must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("SwapParams: sigma must be positive");
  if (!(coupon_interval > 0.0) || !(maturity > 0.0))
    throw std::invalid_argument("SwapParams: coupon schedule must be positive");
  if (!(horizon > 0.0 && horizon < coupon_interval))
    throw std::invalid_argument("SwapParams: horizon must lie in (0, coupon_interval)");

  double ratio = maturity / coupon_interval;
  d_ = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - d_) > 1e-9)
    throw std::invalid_argument("SwapParams: maturity must be a whole number of coupon periods");
  if (d_ < 2)
    throw std::invalid_argument("SwapParams: need at least two coupons (annuity is empty)");

  dates_.resize(static_cast<std::size_t>(d_));
  weights_.resize(static_cast<std::size_t>(d_));
  double sum_w = 0.0;
  for (int i = 1; i <= d_; i++) {
    double ti = coupon_interval * i;
    double ti_prev = coupon_interval * (i - 1);
    dates_[static_cast<std::size_t>(i) - 1] = ti;
    double w = std::exp(-r * ti) * coupon_interval * std::exp(kappa * ti_prev);
    weights_[static_cast<std::size_t>(i) - 1] = w;
    sum_w += w;
  }
  annuity_ = sum_w - weights_[0];

  double sum_rho_delta = 0.0;
  for (int i = 1; i <= d_; i++)
    sum_rho_delta += std::exp(-r * dates_[static_cast<std::size_t>(i) - 1]) * coupon_interval;
  strike_ = s0 * sum_w / sum_rho_delta;

  nominal_ = kBasisPointScale / (s0 * sum_w);
  loss_scale_ = nominal_ * annuity_ * s0;
}

double SwapParams::par_value() const {
  KahanSum acc;
  for (int i = 1; i <= d_; i++) {
    double ti = dates_[static_cast<std::size_t>(i) - 1];
    double ti_prev = coupon_interval * (i - 1);
    acc.add(std::exp(-r * ti) * coupon_interval *
            (std::exp(kappa * ti_prev) * s0 - strike_));
  }
  return nominal_ * acc.sum;
}

double swap_par_strike(const SwapParams& p) { return p.par_strike(); }
double swap_annuity(const SwapParams& p) { return p.annuity(); }
double swap_nominal(const SwapParams& p) { return p.nominal(); }

EstimatePair swap_truth(const SwapParams& p) {
  double scale = p.loss_scale();
  double sig_sqrt_d = p.sigma * std::sqrt(p.horizon);
  double half_var = 0.5 * p.sigma * p.sigma * p.horizon;
  double alpha = p.level.alpha();
  double growth = std::exp(std_normal_inv_cdf(alpha) * sig_sqrt_d - half_var);
  double xi = scale * (growth - 1.0);
  // omega/s0 equals the lognormal growth factor at the VaR quantile.
  double eta_minus = (std::log(growth) - half_var) / sig_sqrt_d;
  double chi = scale * (alpha - std_normal_cdf(eta_minus)) * p.level.inv_tail();
  return {xi, chi};
}

double swap_phi(double y, std::span<const double> z, const SwapParams& p) {
  if (static_cast<int>(z.size()) != p.coupon_count() - 1)
    throw std::invalid_argument("swap_phi: inner factor vector must have d-1 entries");
  double prod = 1.0;
  double acc = 0.0;
  for (int i = 2; i <= p.coupon_count(); i++) {
    prod *= z[static_cast<std::size_t>(i) - 2];
    acc += p.weight(i) * (y * prod - 1.0);
  }
  return p.nominal() * p.s0 * acc;
}

double swap_exact_loss(double u, const SwapParams& p) {
  double sig_sqrt_d = p.sigma * std::sqrt(p.horizon);
  double half_var = 0.5 * p.sigma * p.sigma * p.horizon;
  return p.loss_scale() * (std::exp(-half_var + sig_sqrt_d * u) - 1.0);
}

SwapModel::SwapModel(SwapParams p) : params_(p) {
  int d = params_.coupon_count();
  z_drift_.resize(static_cast<std::size_t>(d) - 1);
  z_vol_.resize(static_cast<std::size_t>(d) - 1);
  double stub = params_.coupon_dates()[0] - params_.horizon;  // T_1 - delta
  for (int j = 0; j < d - 1; j++) {
    double span = j == 0 ? stub : params_.coupon_interval;
    z_drift_[static_cast<std::size_t>(j)] = -0.5 * params_.sigma * params_.sigma * span;
    z_vol_[static_cast<std::size_t>(j)] = params_.sigma * std::sqrt(span);
  }
  y_drift_ = -0.5 * params_.sigma * params_.sigma * params_.horizon;
  y_vol_ = params_.sigma * std::sqrt(params_.horizon);
}

double SwapModel::draw_outer(RngStream& rng) const {
  return std::exp(y_drift_ + y_vol_ * rng.normal());
}

double SwapModel::payoff_sum(double outer, std::int64_t count, RngStream& rng) const {
  int d = params_.coupon_count();
  double ns0 = params_.nominal() * params_.s0;
  KahanSum acc;
  for (std::int64_t k = 0; k < count; k++) {
    double prod = outer;
    double payoff = 0.0;
    for (int i = 2; i <= d; i++) {
      int j = i - 2;
      prod *= std::exp(z_drift_[static_cast<std::size_t>(j)] +
                       z_vol_[static_cast<std::size_t>(j)] * rng.normal());
      payoff += params_.weight(i) * (prod - 1.0);
    }
    acc.add(ns0 * payoff);
  }
  return acc.sum;
}

double SwapModel::draw_exact_loss(RngStream& rng) const {
  return swap_exact_loss(rng.normal(), params_);
}

std::optional<EstimatePair> SwapModel::analytic_truth() const {
  return swap_truth(params_);
}

}  // namespace mlsa
