#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>

namespace footcast {

template <std::floating_point Scalar>
inline constexpr Scalar neg_inf = -std::numeric_limits<Scalar>::infinity();

/// log(exp(a) + exp(b)), exact when either argument is -inf.
template <std::floating_point Scalar>
Scalar log_sum_exp(Scalar a, Scalar b) {
  if (a == neg_inf<Scalar>) return b;
  if (b == neg_inf<Scalar>) return a;
  const Scalar hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

/// log(sum(exp(x))) over a dense expression.
template <typename Derived>
typename Derived::Scalar log_sum_exp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  if (x.size() == 0) return neg_inf<Scalar>;
  const Scalar hi = x.maxCoeff();
  if (hi == neg_inf<Scalar>) return hi;
  return hi + std::log((x.derived().array() - hi).exp().sum());
}

template <std::floating_point Scalar>
Scalar log_factorial(int n) {
  return std::lgamma(static_cast<Scalar>(n) + Scalar(1));
}

template <std::floating_point Scalar>
Scalar log_normal_density(Scalar x, Scalar mean, Scalar sd) {
  constexpr Scalar half_log_two_pi = Scalar(0.91893853320467274178032973640562L);
  const Scalar z = (x - mean) / sd;
  return -half_log_two_pi - std::log(sd) - Scalar(0.5) * z * z;
}

template <std::floating_point Scalar>
Scalar log_poisson(int k, Scalar rate) {
  if (rate == Scalar(0)) return k == 0 ? Scalar(0) : neg_inf<Scalar>;
  return static_cast<Scalar>(k) * std::log(rate) - rate - log_factorial<Scalar>(k);
}

inline double logistic(double u) {
  return u >= 0 ? 1.0 / (1.0 + std::exp(-u)) : std::exp(u) / (1.0 + std::exp(u));
}

inline double logit(double p) { return std::log(p) - std::log1p(-p); }

/// log of the standard normal CDF; uses the asymptotic series in the far lower tail.
double log_normal_cdf(double x);

/// Inverse standard normal CDF (Acklam's rational approximation plus one Halley step).
double normal_quantile(double p);

/// Half-Cauchy(0, scale) log density on x > 0.
double log_half_cauchy(double x, double scale);

/// d/dx of log_half_cauchy.
double d_log_half_cauchy(double x, double scale);

/// Type-7 (linear interpolation) empirical quantile of sorted data.
double sorted_quantile(const Eigen::Ref<const Eigen::VectorXd>& sorted, double prob);

}  // namespace footcast
