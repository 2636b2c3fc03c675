#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace mlsa {

// Confidence level alpha in (0,1), e.g. 0.975 for a 97.5% VaR.
class RiskLevel {
public:
  explicit RiskLevel(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
      throw std::invalid_argument("RiskLevel: alpha must lie in (0,1)");
  }

  double alpha() const { return alpha_; }
  double tail() const { return 1.0 - alpha_; }
  double inv_tail() const { return 1.0 / (1.0 - alpha_); }

  // max(1, alpha/(1-alpha)); bounds the per-step VaR update magnitude.
  double k_alpha() const {
    double r = alpha_ / (1.0 - alpha_);
    return r > 1.0 ? r : 1.0;
  }

private:
  double alpha_;
};

// A (VaR, ES) iterate or target couple.
struct EstimatePair {
  double xi = 0.0;   // VaR component
  double chi = 0.0;  // ES component

  bool finite() const { return std::isfinite(xi) && std::isfinite(chi); }
};

// Gradient kernel of the Rockafellar-Uryasev objective:
// h1(xi, x) = 1 - 1{x >= xi}/(1-alpha).
inline double h1(double xi, double x, const RiskLevel& level) {
  return x >= xi ? 1.0 - level.inv_tail() : 1.0;
}

// ES update kernel: h2(xi, chi, x) = chi - (xi + (x-xi)^+/(1-alpha)).
inline double h2(double xi, double chi, double x, const RiskLevel& level) {
  double excess = x - xi;
  return chi - (xi + (excess > 0.0 ? excess * level.inv_tail() : 0.0));
}

// Monte-Carlo plug-in of V(xi) = xi + E[(X-xi)^+]/(1-alpha); diagnostics only.
double empirical_v(double xi, std::span<const double> samples, const RiskLevel& level);

// Standard Gaussian cdf/pdf/quantile. The quantile is a rational minimax
// approximation polished by one Newton step, accurate to ~1e-15.
double std_normal_cdf(double x);
double std_normal_pdf(double x);
double std_normal_inv_cdf(double p);

}  // namespace mlsa
