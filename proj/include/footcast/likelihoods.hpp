#pragma once

#include "footcast/numeric.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <concepts>
#include <cstdlib>
#include <string>
#include <string_view>
#include <utility>

namespace footcast {

/// Score model families: double Poisson, bivariate Poisson, diagonally inflated
/// bivariate Poisson, negative binomial pair, Skellam and zero-inflated Skellam.
enum class Family { dp, bp, dibp, nb, sm, zism };

std::string_view to_string(Family family);
Family parse_family(std::string_view text);

constexpr bool models_difference(Family f) { return f == Family::sm || f == Family::zism; }
constexpr bool has_eta0(Family f) { return f == Family::bp || f == Family::dibp; }
constexpr bool has_gamma(Family f) { return f == Family::nb; }
constexpr bool has_omega(Family f) { return f == Family::dibp || f == Family::zism; }
constexpr bool has_xi(Family f) { return f == Family::dibp; }

template <std::floating_point Scalar>
struct ScoringRates {
  Scalar lambda1{1};
  Scalar lambda2{1};
  Scalar lambda3{0};
};

/// Family-specific parameters; fields not used by `family` are ignored.
struct FamilyParams {
  Family family = Family::dp;
  double gamma = 1.0;
  double omega = 0.0;
  double xi = 1.0;
  double eta0 = 0.0;
};

/// Log-linear scoring rates: home side gets the home bonus plus its attack against the
/// visitor's defence; the away side its attack against the home defence.
template <std::floating_point Scalar>
constexpr std::pair<Scalar, Scalar> log_scoring_rates(Scalar beta0, Scalar home, Scalar att_home,
                                                      Scalar def_away, Scalar att_away,
                                                      Scalar def_home) {
  return {beta0 + home + att_home + def_away, beta0 + att_away + def_home};
}

template <std::floating_point Scalar>
Scalar log_pmf_double_poisson(int x, int y, const ScoringRates<Scalar>& r) {
  return log_poisson(x, r.lambda1) + log_poisson(y, r.lambda2);
}

/// Log of the k-sum factor of the bivariate Poisson pmf,
/// log sum_k C(x,k) C(y,k) k! (lambda3 / (lambda1 lambda2))^k.
/// If `mean_k` is given it receives the softmax-weighted mean of k.
template <std::floating_point Scalar>
Scalar log_bp_ksum(int x, int y, const ScoringRates<Scalar>& r, Scalar* mean_k = nullptr) {
  const int kmax = std::min(x, y);
  if (r.lambda3 == Scalar(0) || kmax == 0) {
    if (mean_k) *mean_k = Scalar(0);
    return Scalar(0);
  }
  const Scalar log_ratio = std::log(r.lambda3) - std::log(r.lambda1) - std::log(r.lambda2);
  const Scalar lfx = log_factorial<Scalar>(x);
  const Scalar lfy = log_factorial<Scalar>(y);

  // terms t_k in log space; first pass for the max, second for the scaled sum
  auto term = [&](int k) {
    return lfx - log_factorial<Scalar>(x - k) + lfy - log_factorial<Scalar>(y - k) -
           log_factorial<Scalar>(k) + static_cast<Scalar>(k) * log_ratio;
  };
  Scalar hi = neg_inf<Scalar>;
  for (int k = 0; k <= kmax; ++k) hi = std::max(hi, term(k));
  Scalar sum = 0;
  Scalar weighted = 0;
  for (int k = 0; k <= kmax; ++k) {
    const Scalar w = std::exp(term(k) - hi);
    sum += w;
    weighted += w * static_cast<Scalar>(k);
  }
  if (mean_k) *mean_k = weighted / sum;
  return hi + std::log(sum);
}

template <std::floating_point Scalar>
Scalar log_pmf_bivariate_poisson(int x, int y, const ScoringRates<Scalar>& r) {
  if (r.lambda3 == Scalar(0)) return log_pmf_double_poisson(x, y, r);
  return log_pmf_double_poisson(x, y, r) - r.lambda3 + log_bp_ksum(x, y, r);
}

/// Diagonally inflated bivariate Poisson; the diagonal component is Poisson(xi) on the
/// common score of a draw.
template <std::floating_point Scalar>
Scalar log_pmf_dibp(int x, int y, const ScoringRates<Scalar>& r, Scalar omega, Scalar xi) {
  const Scalar log_keep = omega < Scalar(1) ? std::log1p(-omega) : neg_inf<Scalar>;
  const Scalar base = log_keep == neg_inf<Scalar> ? neg_inf<Scalar>
                                                  : log_keep + log_pmf_bivariate_poisson(x, y, r);
  if (x != y || omega == Scalar(0)) return base;
  return log_sum_exp(base, std::log(omega) + log_poisson(x, xi));
}

/// Negative binomial with mean lambda and variance lambda (1 + gamma lambda).
/// Written via log1p so gamma -> 0 recovers the Poisson without cancellation.
template <std::floating_point Scalar>
Scalar log_negbin(int x, Scalar mean, Scalar gamma) {
  Scalar rising = 0;
  for (int j = 1; j < x; ++j) rising += std::log1p(static_cast<Scalar>(j) * gamma);
  const Scalar gm = gamma * mean;
  return rising - log_factorial<Scalar>(x) + static_cast<Scalar>(x) * std::log(mean) -
         (static_cast<Scalar>(x) + Scalar(1) / gamma) * std::log1p(gm);
}

template <std::floating_point Scalar>
Scalar log_pmf_negbin_pair(int x, int y, const ScoringRates<Scalar>& r, Scalar gamma) {
  return log_negbin(x, r.lambda1, gamma) + log_negbin(y, r.lambda2, gamma);
}

/// log I_h(z), modified Bessel function of the first kind, from the ascending series.
/// Terms are summed outward from the largest one and scaled by it; summation stops once
/// a term is 40 nats below the peak. Large arguments (z > 1000, z > 4h^2) use the
/// Hankel expansion instead.
template <std::floating_point Scalar>
Scalar log_bessel_i(int order, Scalar z) {
  if (z == Scalar(0)) return order == 0 ? Scalar(0) : neg_inf<Scalar>;
  if (std::isnan(z)) return z;
  if (std::isinf(z)) return std::numeric_limits<Scalar>::infinity();
  const Scalar h = static_cast<Scalar>(std::abs(order));
  if (z > Scalar(1000) && z > Scalar(4) * h * h) {
    const Scalar mu = Scalar(4) * h * h;
    Scalar sum = 1, t = 1;
    for (int k = 1; k < 40; ++k) {
      const Scalar odd = static_cast<Scalar>(2 * k - 1);
      const Scalar next = -t * (mu - odd * odd) / (static_cast<Scalar>(8 * k) * z);
      if (std::abs(next) >= std::abs(t)) break;
      t = next;
      sum += t;
      if (std::abs(t) < std::numeric_limits<Scalar>::epsilon() * Scalar(1e-2)) break;
    }
    return z - Scalar(0.5) * std::log(Scalar(2) * std::numbers::pi_v<Scalar> * z) + std::log(sum);
  }
  const Scalar half = z / Scalar(2);
  const Scalar q = half * half;
  const Scalar log_half = std::log(half);

  // peak index solves m (m + h) = (z/2)^2
  const Scalar m_peak = (-h + std::sqrt(h * h + z * z)) / Scalar(2);
  const long peak = static_cast<long>(std::floor(m_peak));
  const Scalar log_peak = (Scalar(2) * static_cast<Scalar>(peak) + h) * log_half -
                          std::lgamma(static_cast<Scalar>(peak) + Scalar(1)) -
                          std::lgamma(static_cast<Scalar>(peak) + h + Scalar(1));
  const Scalar stop = std::exp(Scalar(-40));

  Scalar sum = 1;
  Scalar t = 1;
  for (long m = peak;; ++m) {  // upward: t_{m+1}/t_m = q / ((m+1)(m+1+h))
    const Scalar mm = static_cast<Scalar>(m + 1);
    t *= q / (mm * (mm + h));
    sum += t;
    if (!(t >= stop * sum)) break;
  }
  t = 1;
  for (long m = peak; m > 0; --m) {  // downward: t_{m-1}/t_m = m (m+h) / q
    const Scalar mm = static_cast<Scalar>(m);
    t *= mm * (mm + h) / q;
    sum += t;
    if (t < stop * sum) break;
  }
  return log_peak + std::log(sum);
}

/// Skellam pmf of the goal difference z = x - y.
template <std::floating_point Scalar>
Scalar log_pmf_skellam(int z, const ScoringRates<Scalar>& r) {
  const Scalar arg = Scalar(2) * std::sqrt(r.lambda1 * r.lambda2);
  return -(r.lambda1 + r.lambda2) +
         static_cast<Scalar>(z) / Scalar(2) * (std::log(r.lambda1) - std::log(r.lambda2)) +
         log_bessel_i(std::abs(z), arg);
}

template <std::floating_point Scalar>
Scalar log_pmf_zi_skellam(int z, const ScoringRates<Scalar>& r, Scalar omega) {
  const Scalar log_keep = omega < Scalar(1) ? std::log1p(-omega) : neg_inf<Scalar>;
  const Scalar base =
      log_keep == neg_inf<Scalar> ? neg_inf<Scalar> : log_keep + log_pmf_skellam(z, r);
  if (z != 0 || omega == Scalar(0)) return base;
  return log_sum_exp(base, std::log(omega));
}

/// Dispatches on the family. Difference families evaluate at z = x - y.
double log_pmf(int x, int y, const ScoringRates<double>& rates, const FamilyParams& params);

/// Log-pmf value plus partial derivatives with respect to the log-scale quantities the
/// sampler works in: log lambda1, log lambda2, eta0 = log lambda3, logit omega, log xi,
/// log gamma. Partials for parameters the family does not use are zero.
struct LogPmfGradient {
  double value = 0;
  double d_log_lambda1 = 0;
  double d_log_lambda2 = 0;
  double d_eta0 = 0;
  double d_logit_omega = 0;
  double d_log_xi = 0;
  double d_log_gamma = 0;
};

LogPmfGradient log_pmf_with_gradient(int x, int y, const ScoringRates<double>& rates,
                                     const FamilyParams& params);

}  // namespace footcast
