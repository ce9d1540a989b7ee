#include "footcast/numeric.hpp"

#include <doctest.h>

#include <cmath>

using namespace footcast;

TEST_CASE("log_sum_exp") {
  CHECK(log_sum_exp(std::log(2.0), std::log(3.0)) == doctest::Approx(std::log(5.0)));
  CHECK(log_sum_exp(neg_inf<double>, 1.5) == 1.5);
  CHECK(log_sum_exp(1000.0, 1000.0) == doctest::Approx(1000.0 + std::log(2.0)));
  Eigen::Vector3d v(-1000, -1000, neg_inf<double>);
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)));
  CHECK(log_sum_exp(Eigen::VectorXd()) == neg_inf<double>);
}

TEST_CASE("normal cdf and quantile agree") {
  for (double x : {-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0}) {
    const double p = 0.5 * std::erfc(-x / std::sqrt(2.0));
    CHECK(log_normal_cdf(x) == doctest::Approx(std::log(p)).epsilon(1e-12));
    if (x < 3) CHECK(normal_quantile(p) == doctest::Approx(x).epsilon(1e-9));
  }
  // far tail keeps going where erfc underflows
  CHECK(std::isfinite(log_normal_cdf(-60.0)));
  CHECK(log_normal_cdf(-60.0) == doctest::Approx(-1804.1).epsilon(1e-3));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("half-Cauchy integrates to one") {
  // substitute x = s tan(t) on (0, pi/2)
  const double s = 5.0;
  const int n = 20000;
  double total = 0;
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * (M_PI / 2) / n;
    const double x = s * std::tan(t);
    total += std::exp(log_half_cauchy(x, s)) * s / (std::cos(t) * std::cos(t)) * (M_PI / 2) / n;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-8));
  const double h = 1e-6;
  CHECK(d_log_half_cauchy(2.0, s) ==
        doctest::Approx((log_half_cauchy(2.0 + h, s) - log_half_cauchy(2.0 - h, s)) / (2 * h)).epsilon(1e-7));
}

TEST_CASE("type-7 quantile") {
  Eigen::VectorXd x(5);
  x << 1, 2, 3, 4, 10;
  CHECK(sorted_quantile(x, 0.0) == 1);
  CHECK(sorted_quantile(x, 1.0) == 10);
  CHECK(sorted_quantile(x, 0.5) == 3);
  CHECK(sorted_quantile(x, 0.9) == doctest::Approx(7.6));
}
