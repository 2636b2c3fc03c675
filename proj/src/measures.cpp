#include "mlsa/measures.hpp"

namespace mlsa {

double empirical_v(double xi, std::span<const double> samples, const RiskLevel& level) {
  if (samples.empty())
    throw std::invalid_argument("empirical_v: empty sample sequence");
  double acc = 0.0;
  for (double x : samples) {
    double excess = x - xi;
    if (excess > 0.0) acc += excess;
  }
  return xi + acc / static_cast<double>(samples.size()) * level.inv_tail();
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.7071067811865475244);
}

double std_normal_pdf(double x) {
  return 0.3989422804014326779 * std::exp(-0.5 * x * x);
}

namespace {

// Acklam's rational approximation to the standard normal quantile (~1.15e-9
// relative error before polishing).
double inv_cdf_seed(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_inv_cdf(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::domain_error("std_normal_inv_cdf: p must lie strictly inside (0,1)");
  double x = inv_cdf_seed(p);
  // One Newton step with the analytic density.
  double e = std_normal_cdf(x) - p;
  x -= e / std_normal_pdf(x);
  return x;
}

}  // namespace mlsa
