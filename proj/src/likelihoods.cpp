#include "footcast/likelihoods.hpp"

#include <stdexcept>

namespace footcast {

std::string_view to_string(Family family) {
  switch (family) {
    case Family::dp: return "dp";
    case Family::bp: return "bp";
    case Family::dibp: return "dibp";
    case Family::nb: return "nb";
    case Family::sm: return "sm";
    case Family::zism: return "zism";
  }
  return "?";
}

Family parse_family(std::string_view text) {
  for (Family f : {Family::dp, Family::bp, Family::dibp, Family::nb, Family::sm, Family::zism}) {
    if (text == to_string(f)) return f;
  }
  throw std::invalid_argument("unknown family '" + std::string(text) + "'");
}

double log_pmf(int x, int y, const ScoringRates<double>& rates, const FamilyParams& p) {
  switch (p.family) {
    case Family::dp: return log_pmf_double_poisson(x, y, rates);
    case Family::bp: return log_pmf_bivariate_poisson(x, y, rates);
    case Family::dibp: return log_pmf_dibp(x, y, rates, p.omega, p.xi);
    case Family::nb: return log_pmf_negbin_pair(x, y, rates, p.gamma);
    case Family::sm: return log_pmf_skellam(x - y, rates);
    case Family::zism: return log_pmf_zi_skellam(x - y, rates, p.omega);
  }
  return neg_inf<double>;
}

namespace {

LogPmfGradient double_poisson_gradient(int x, int y, const ScoringRates<double>& r) {
  LogPmfGradient g;
  g.value = log_pmf_double_poisson(x, y, r);
  g.d_log_lambda1 = x - r.lambda1;
  g.d_log_lambda2 = y - r.lambda2;
  return g;
}

LogPmfGradient bivariate_poisson_gradient(int x, int y, const ScoringRates<double>& r) {
  double mean_k = 0;
  LogPmfGradient g;
  g.value = log_pmf_double_poisson(x, y, r) - r.lambda3 + log_bp_ksum(x, y, r, &mean_k);
  g.d_log_lambda1 = x - r.lambda1 - mean_k;
  g.d_log_lambda2 = y - r.lambda2 - mean_k;
  g.d_eta0 = mean_k - r.lambda3;
  return g;
}

// value and d/dlog(mean), d/dlog(gamma) for one negative binomial margin
struct NegbinParts {
  double value;
  double d_log_mean;
  double d_log_gamma;
};

NegbinParts negbin_parts(int x, double mean, double gamma) {
  double rising_grad = 0;
  for (int j = 1; j < x; ++j) rising_grad += j * gamma / (1.0 + j * gamma);
  const double gm = gamma * mean;
  const double denom = 1.0 + gm;
  return {log_negbin(x, mean, gamma), (x - mean) / denom,
          rising_grad + std::log1p(gm) / gamma - (x * gamma + 1.0) * mean / denom};
}

LogPmfGradient skellam_gradient(int z, const ScoringRates<double>& r) {
  const int h = std::abs(z);
  const double u = 2.0 * std::sqrt(r.lambda1 * r.lambda2);
  const double log_ih = log_bessel_i(h, u);
  const double ratio = std::exp(log_bessel_i(h + 1, u) - log_ih);  // I_{h+1}/I_h
  LogPmfGradient g;
  g.value = -(r.lambda1 + r.lambda2) + 0.5 * z * (std::log(r.lambda1) - std::log(r.lambda2)) + log_ih;
  const double shared = 0.5 * u * ratio + 0.5 * h;
  g.d_log_lambda1 = -r.lambda1 + 0.5 * z + shared;
  g.d_log_lambda2 = -r.lambda2 - 0.5 * z + shared;
  return g;
}

// Mixes `base` (weight 1 - omega) with a point component of log mass `log_extra`
// (weight omega). Partials of `base` are scaled by its posterior share.
LogPmfGradient inflate(LogPmfGradient base, double omega, bool inflated_cell, double log_extra,
                       double d_extra_log_xi) {
  const double log_keep = std::log1p(-omega);
  if (!inflated_cell) {
    base.value += log_keep;
    base.d_logit_omega = -omega;
    return base;
  }
  const double a = log_keep + base.value;
  const double b = omega > 0 ? std::log(omega) + log_extra : neg_inf<double>;
  const double v = log_sum_exp(a, b);
  const double wa = std::exp(a - v);
  const double wb = b == neg_inf<double> ? 0.0 : std::exp(b - v);
  LogPmfGradient g;
  g.value = v;
  g.d_log_lambda1 = wa * base.d_log_lambda1;
  g.d_log_lambda2 = wa * base.d_log_lambda2;
  g.d_eta0 = wa * base.d_eta0;
  g.d_logit_omega = -omega * wa + (1.0 - omega) * wb;
  g.d_log_xi = wb * d_extra_log_xi;
  return g;
}

}  // namespace

LogPmfGradient log_pmf_with_gradient(int x, int y, const ScoringRates<double>& r,
                                     const FamilyParams& p) {
  switch (p.family) {
    case Family::dp: return double_poisson_gradient(x, y, r);
    case Family::bp: return bivariate_poisson_gradient(x, y, r);
    case Family::dibp:
      return inflate(bivariate_poisson_gradient(x, y, r), p.omega, x == y, log_poisson(x, p.xi),
                     x - p.xi);
    case Family::nb: {
      const auto hx = negbin_parts(x, r.lambda1, p.gamma);
      const auto hy = negbin_parts(y, r.lambda2, p.gamma);
      LogPmfGradient g;
      g.value = hx.value + hy.value;
      g.d_log_lambda1 = hx.d_log_mean;
      g.d_log_lambda2 = hy.d_log_mean;
      g.d_log_gamma = hx.d_log_gamma + hy.d_log_gamma;
      return g;
    }
    case Family::sm: return skellam_gradient(x - y, r);
    case Family::zism: return inflate(skellam_gradient(x - y, r), p.omega, x == y, 0.0, 0.0);
  }
  return {};
}

}  // namespace footcast
