#include "footcast/likelihoods.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace footcast;

namespace {

FamilyParams params(Family f) {
  FamilyParams p;
  p.family = f;
  p.gamma = 0.3;
  p.omega = 0.15;
  p.xi = 1.2;
  p.eta0 = std::log(0.25);
  return p;
}

// brute-force sum over a (k+1)^2 grid
double grid_mass(const ScoringRates<double>& r, const FamilyParams& p, int k = 80) {
  double total = 0;
  for (int x = 0; x <= k; ++x) {
    for (int y = 0; y <= k; ++y) total += std::exp(log_pmf(x, y, r, p));
  }
  return total;
}

double difference_mass(const ScoringRates<double>& r, const FamilyParams& p, int k = 80) {
  double total = 0;
  for (int z = -k; z <= k; ++z) total += std::exp(log_pmf(std::max(z, 0), std::max(-z, 0), r, p));
  return total;
}

}  // namespace

TEST_CASE("families normalise") {
  const ScoringRates<double> r{1.7, 0.9, 0.25};
  for (Family f : {Family::dp, Family::bp, Family::dibp, Family::nb}) {
    CHECK(grid_mass(r, params(f)) == doctest::Approx(1.0).epsilon(1e-10));
  }
  for (Family f : {Family::sm, Family::zism}) CHECK(difference_mass(r, params(f)) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("parse and print families") {
  for (Family f : {Family::dp, Family::bp, Family::dibp, Family::nb, Family::sm, Family::zism}) {
    CHECK(parse_family(to_string(f)) == f);
  }
  CHECK_THROWS_AS(parse_family("poisson"), std::invalid_argument);
}

TEST_CASE("Skellam against a Poisson-difference convolution") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> rate(0.05, 4.0);
  for (int rep = 0; rep < 5; ++rep) {
    const ScoringRates<double> r{rate(rng), rate(rng), 0};
    for (int z = -10; z <= 10; ++z) {
      double conv = 0;
      for (int y = 0; y <= 60; ++y) {
        const int x = y + z;
        if (x < 0 || x > 60) continue;
        conv += std::exp(log_poisson(x, r.lambda1) + log_poisson(y, r.lambda2));
      }
      CHECK(std::exp(log_pmf_skellam(z, r)) == doctest::Approx(conv).epsilon(1e-10));
    }
  }
}

TEST_CASE("Bessel function limits") {
  CHECK(log_bessel_i(0, 0.0) == 0.0);
  CHECK(log_bessel_i(3, 0.0) == neg_inf<double>);
  CHECK(std::exp(log_bessel_i(0, 2.0)) == doctest::Approx(2.2795853023360673).epsilon(1e-14));
  CHECK(std::exp(log_bessel_i(1, 1.0)) == doctest::Approx(0.5651591039924851).epsilon(1e-14));
  // large argument: log I_0(z) ~ z - log(2 pi z) / 2
  CHECK(log_bessel_i(0, 2000.0) == doctest::Approx(2000.0 - 0.5 * std::log(2 * M_PI * 2000.0) + std::log1p(1.0 / 16000)).epsilon(1e-9));
}

TEST_CASE("zero-inflation lands on ties only") {
  const ScoringRates<double> r{1.3, 1.1, 0.2};
  auto pd = params(Family::dibp);
  auto pb = params(Family::bp);
  CHECK(std::exp(log_pmf(2, 1, r, pd)) == doctest::Approx((1 - pd.omega) * std::exp(log_pmf(2, 1, r, pb))));
  CHECK(std::exp(log_pmf(1, 1, r, pd)) ==
        doctest::Approx((1 - pd.omega) * std::exp(log_pmf(1, 1, r, pb)) + pd.omega * std::exp(log_poisson(1, pd.xi))));
  auto pz = params(Family::zism);
  auto ps = params(Family::sm);
  CHECK(std::exp(log_pmf(3, 3, r, pz)) ==
        doctest::Approx((1 - pz.omega) * std::exp(log_pmf(0, 0, r, ps)) + pz.omega));
}

TEST_CASE("negative binomial variance") {
  const double mean = 1.8, gamma = 0.4;
  double m1 = 0, m2 = 0;
  for (int x = 0; x < 400; ++x) {
    const double p = std::exp(log_negbin(x, mean, gamma));
    m1 += x * p;
    m2 += double(x) * x * p;
  }
  CHECK(m1 == doctest::Approx(mean).epsilon(1e-10));
  CHECK(m2 - m1 * m1 == doctest::Approx(mean * (1 + gamma * mean)).epsilon(1e-9));
}

TEST_CASE("analytic partials match finite differences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const double h = 1e-5;
  for (Family f : {Family::dp, Family::bp, Family::dibp, Family::nb, Family::sm, Family::zism}) {
    for (int rep = 0; rep < 6; ++rep) {
      // log-scale coordinates
      double u[6] = {0.3 + unif(rng), 0.1 + unif(rng), -1.5 + unif(rng), unif(rng), unif(rng), -1 + unif(rng)};
      const int x = rep % 4, y = (rep * 3) % 5 == 0 ? x : (rep * 3) % 5;
      auto eval = [&](const double* w) {
        ScoringRates<double> r{std::exp(w[0]), std::exp(w[1]), has_eta0(f) ? std::exp(w[2]) : 0.0};
        FamilyParams p{f, std::exp(w[5]), logistic(w[3]), std::exp(w[4]), w[2]};
        return std::pair{log_pmf(x, y, r, p), log_pmf_with_gradient(x, y, r, p)};
      };
      const auto [value, g] = eval(u);
      CHECK(g.value == doctest::Approx(value).epsilon(1e-12));
      const double analytic[6] = {g.d_log_lambda1, g.d_log_lambda2, g.d_eta0, g.d_logit_omega, g.d_log_xi, g.d_log_gamma};
      for (int k = 0; k < 6; ++k) {
        double up[6], dn[6];
        std::copy(u, u + 6, up);
        std::copy(u, u + 6, dn);
        up[k] += h;
        dn[k] -= h;
        const double fd = (eval(up).first - eval(dn).first) / (2 * h);
        CHECK(analytic[k] == doctest::Approx(fd).epsilon(1e-6).scale(1.0));
      }
    }
  }
}

TEST_CASE("Bessel I at large arguments") {
  // continuity across the switch to the large-argument expansion
  for (int h : {0, 1, 5, 15}) {
    const double below = log_bessel_i(h, 1000.0);
    const double above = log_bessel_i(h, 1000.0 + 1e-6);
    CHECK(std::abs(above - below - 1e-6) < 1e-8);
  }
  // recurrence I_{h-1} - I_{h+1} = (2h / z) I_h
  for (double z : {2.0e3, 5.0e4, 1.0e9}) {
    for (int h : {1, 4, 20}) {
      const double lh = log_bessel_i(h, z);
      const double lhs = std::exp(log_bessel_i(h - 1, z) - lh) - std::exp(log_bessel_i(h + 1, z) - lh);
      CHECK(lhs == doctest::Approx(2.0 * h / z).epsilon(1e-6));
    }
  }
}

TEST_CASE("Bessel I at non-finite arguments") {
  CHECK(std::isnan(log_bessel_i(2, std::numeric_limits<double>::quiet_NaN())));
  CHECK(log_bessel_i(2, std::numeric_limits<double>::infinity()) == std::numeric_limits<double>::infinity());
}
