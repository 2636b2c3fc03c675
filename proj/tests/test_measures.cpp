#include <doctest.h>

#include <vector>

#include "mlsa/measures.hpp"

using namespace mlsa;

TEST_CASE("risk level accessors and validation") {
  RiskLevel lv(0.975);
  CHECK(lv.alpha() == doctest::Approx(0.975));
  CHECK(lv.tail() == doctest::Approx(0.025));
  CHECK(lv.inv_tail() == doctest::Approx(40.0));
  CHECK(lv.k_alpha() == doctest::Approx(39.0));
  CHECK(RiskLevel(0.2).k_alpha() == doctest::Approx(1.0));
  CHECK_THROWS_AS(RiskLevel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RiskLevel(1.0), std::invalid_argument);
  CHECK_THROWS_AS(RiskLevel(-0.3), std::invalid_argument);
}

TEST_CASE("gradient kernels") {
  RiskLevel lv(0.975);
  // below the threshold the indicator vanishes
  CHECK(h1(1.0, 0.5, lv) == doctest::Approx(1.0));
  // at/above: 1 - 1/(1-alpha)
  CHECK(h1(1.0, 1.0, lv) == doctest::Approx(1.0 - 40.0));
  CHECK(h1(1.0, 2.0, lv) == doctest::Approx(-39.0));
  // h2 with no excess: chi - xi
  CHECK(h2(1.0, 3.0, 0.5, lv) == doctest::Approx(2.0));
  // with excess: chi - xi - (x-xi)/(1-alpha)
  CHECK(h2(1.0, 3.0, 1.5, lv) == doctest::Approx(3.0 - 1.0 - 0.5 * 40.0));
}

TEST_CASE("empirical objective") {
  RiskLevel lv(0.5);
  std::vector<double> xs{-1.0, 0.0, 1.0, 2.0};
  // V(0) = 0 + mean((x)^+) * 2 = (0+0+1+2)/4*2
  CHECK(empirical_v(0.0, xs, lv) == doctest::Approx(1.5));
  CHECK_THROWS_AS(empirical_v(0.0, std::vector<double>{}, lv),
                  std::invalid_argument);
}

TEST_CASE("gaussian cdf/pdf reference values") {
  CHECK(std_normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(std_normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(std_normal_cdf(1.96) == doctest::Approx(0.9750021048517795).epsilon(1e-13));
  CHECK(std_normal_cdf(-8.0) == doctest::Approx(6.22096057427178e-16).epsilon(1e-10));
}

TEST_CASE("gaussian quantile matches high-precision references") {
  CHECK(std_normal_inv_cdf(0.0125) ==
        doctest::Approx(-2.2414027276049454).epsilon(1e-13));
  CHECK(std_normal_inv_cdf(0.85) ==
        doctest::Approx(1.0364333894937896).epsilon(1e-13));
  CHECK(std_normal_inv_cdf(0.5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(std_normal_inv_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_inv_cdf(1.0), std::domain_error);
  CHECK_THROWS_AS(std_normal_inv_cdf(-0.1), std::domain_error);
}

TEST_CASE("quantile inverts the cdf across the bulk and tails") {
  for (double p = 1e-10; p < 1.0; p = p < 0.5 ? p * 3.7 : 1.0 - (1.0 - p) / 3.7) {
    double x = std_normal_inv_cdf(p);
    CHECK(std_normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
  }
}
