#include "footcast/diagnostics.hpp"

#include "footcast/numeric.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <complex>
#include <numeric>
#include <stdexcept>

namespace footcast {

namespace {

bool is_constant(const Eigen::Ref<const Eigen::MatrixXd>& x) {
  return x.size() == 0 || x.maxCoeff() == x.minCoeff();
}

void check_shape(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  if (draws.cols() < 1 || draws.rows() < 4) throw std::invalid_argument("diagnostics need at least 4 draws per chain");
}

// Splits each chain into two halves (dropping the middle draw of odd chains).
Eigen::MatrixXd split_chains(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  const Eigen::Index half = draws.rows() / 2;
  Eigen::MatrixXd out(half, 2 * draws.cols());
  for (Eigen::Index c = 0; c < draws.cols(); ++c) {
    out.col(2 * c) = draws.col(c).head(half);
    out.col(2 * c + 1) = draws.col(c).tail(half);
  }
  return out;
}

double rhat_basic(const Eigen::MatrixXd& x) {
  const double n = static_cast<double>(x.rows());
  const Eigen::Index m = x.cols();
  const Eigen::VectorXd means = x.colwise().mean();
  Eigen::VectorXd vars(m);
  for (Eigen::Index c = 0; c < m; ++c) vars(c) = (x.col(c).array() - means(c)).square().sum() / (n - 1);
  const double w = vars.mean();
  const double b = m > 1 ? n * (means.array() - means.mean()).square().sum() / static_cast<double>(m - 1) : 0.0;
  if (!(w > 0)) return 1.0;
  const double var_plus = (n - 1) / n * w + b / n;
  return std::sqrt(var_plus / w);
}

Eigen::VectorXd autocovariance(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::Index size = 1;
  while (size < 2 * n) size <<= 1;
  std::vector<double> padded(static_cast<std::size_t>(size), 0.0);
  const double mean = x.mean();
  for (Eigen::Index i = 0; i < n; ++i) padded[static_cast<std::size_t>(i)] = x(i) - mean;
  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> freq;
  fft.fwd(freq, padded);
  for (auto& f : freq) f = std::norm(f);
  std::vector<double> back;
  fft.inv(back, freq);
  Eigen::VectorXd acov(n);
  for (Eigen::Index k = 0; k < n; ++k) acov(k) = back[static_cast<std::size_t>(k)] / static_cast<double>(n);
  return acov;
}

EssResult ess_of(const Eigen::MatrixXd& x) {
  const Eigen::Index m = x.cols();
  const Eigen::Index n = x.rows();
  const double total = static_cast<double>(n * m);
  if (is_constant(x)) return {total, true};

  Eigen::MatrixXd acov(n, m);
  Eigen::VectorXd means(m), vars(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    acov.col(c) = autocovariance(x.col(c));
    means(c) = x.col(c).mean();
    vars(c) = acov(0, c) * static_cast<double>(n) / static_cast<double>(n - 1);
  }
  const double w = vars.mean();
  double var_plus = w * static_cast<double>(n - 1) / static_cast<double>(n);
  if (m > 1) var_plus += (means.array() - means.mean()).square().sum() / static_cast<double>(m - 1);
  if (!(var_plus > 0)) return {total, true};

  auto rho = [&](Eigen::Index t) { return 1.0 - (w - acov.row(t).mean()) / var_plus; };

  // Geyer: sum paired autocorrelations while positive, forcing them monotone
  std::vector<double> pairs;
  double prev = std::numeric_limits<double>::infinity();
  for (Eigen::Index t = 0; t + 1 < n; t += 2) {
    double p = rho(t) + rho(t + 1);
    if (!(p > 0)) break;
    p = std::min(p, prev);
    pairs.push_back(p);
    prev = p;
  }
  double tau = -1.0;
  for (double p : pairs) tau += 2.0 * p;
  tau = std::max(tau, 1.0 / std::log10(total));
  return {std::min(total / tau, total), false};
}

Eigen::MatrixXd fold(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  Eigen::MatrixXd plain = draws;
  std::vector<double> all(plain.data(), plain.data() + plain.size());
  std::nth_element(all.begin(), all.begin() + static_cast<long>(all.size() / 2), all.end());
  double median = all[all.size() / 2];
  if (all.size() % 2 == 0) {
    const double lower = *std::max_element(all.begin(), all.begin() + static_cast<long>(all.size() / 2));
    median = 0.5 * (median + lower);
  }
  return (plain.array() - median).abs().matrix();
}

double quantile_of(const Eigen::Ref<const Eigen::MatrixXd>& draws, double prob) {
  Eigen::MatrixXd plain = draws;
  Eigen::VectorXd all = Eigen::Map<Eigen::VectorXd>(plain.data(), plain.size());
  std::sort(all.data(), all.data() + all.size());
  return sorted_quantile(all, prob);
}

}  // namespace

Eigen::MatrixXd rank_normalize(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  Eigen::MatrixXd plain = draws;
  const Eigen::Index s = plain.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(s));
  std::iota(order.begin(), order.end(), 0);
  const double* data = plain.data();
  std::stable_sort(order.begin(), order.end(), [data](Eigen::Index a, Eigen::Index b) { return data[a] < data[b]; });
  Eigen::MatrixXd out(plain.rows(), plain.cols());
  double* o = out.data();
  for (Eigen::Index i = 0; i < s;) {
    Eigen::Index j = i;
    while (j + 1 < s && data[order[static_cast<std::size_t>(j + 1)]] == data[order[static_cast<std::size_t>(i)]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    const double z = normal_quantile((rank - 0.375) / (static_cast<double>(s) + 0.25));
    for (Eigen::Index k = i; k <= j; ++k) o[order[static_cast<std::size_t>(k)]] = z;
    i = j + 1;
  }
  return out;
}

double split_rhat(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  check_shape(draws);
  if (is_constant(draws)) return 1.0;
  if (!draws.allFinite()) return std::numeric_limits<double>::quiet_NaN();
  const double bulk = rhat_basic(split_chains(rank_normalize(draws)));
  const double tail = rhat_basic(split_chains(rank_normalize(fold(draws))));
  const double classic = rhat_basic(split_chains(draws));
  return std::max({bulk, tail, classic});
}

EssResult ess_basic(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  check_shape(draws);
  return ess_of(split_chains(draws));
}

EssResult ess_bulk(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  check_shape(draws);
  if (is_constant(draws)) return {static_cast<double>(draws.size()), true};
  return ess_of(split_chains(rank_normalize(draws)));
}

EssResult ess_tail(const Eigen::Ref<const Eigen::MatrixXd>& draws) {
  check_shape(draws);
  if (is_constant(draws)) return {static_cast<double>(draws.size()), true};
  const double lo = quantile_of(draws, 0.05);
  const double hi = quantile_of(draws, 0.95);
  const Eigen::MatrixXd below = (draws.array() <= lo).cast<double>();
  const Eigen::MatrixXd above = (draws.array() <= hi).cast<double>();
  const EssResult a = ess_of(split_chains(below));
  const EssResult b = ess_of(split_chains(above));
  return {std::min(a.value, b.value), a.degenerate && b.degenerate};
}

double Diagnostics::max_rhat() const {
  double out = 1;
  for (const auto& p : parameters) out = std::max(out, p.rhat);
  return out;
}

double Diagnostics::min_ess_bulk() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& p : parameters) out = std::min(out, p.ess_bulk);
  return out;
}

double Diagnostics::min_ess_tail() const {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& p : parameters) out = std::min(out, p.ess_tail);
  return out;
}

Diagnostics compute_diagnostics(const std::vector<Eigen::MatrixXd>& chains, const std::vector<std::string>& names,
                                int divergences) {
  if (chains.empty()) throw std::invalid_argument("no chains");
  const Eigen::Index n = chains.front().rows();
  const Eigen::Index d = chains.front().cols();
  if (static_cast<Eigen::Index>(names.size()) != d) throw std::invalid_argument("one name per parameter required");
  Diagnostics out;
  out.divergences = divergences;
  Eigen::MatrixXd column(n, static_cast<Eigen::Index>(chains.size()));
  for (Eigen::Index j = 0; j < d; ++j) {
    for (std::size_t c = 0; c < chains.size(); ++c) column.col(static_cast<Eigen::Index>(c)) = chains[c].col(j);
    out.parameters.push_back({names[static_cast<std::size_t>(j)], split_rhat(column), ess_bulk(column).value,
                              ess_tail(column).value});
  }
  return out;
}

}  // namespace footcast
