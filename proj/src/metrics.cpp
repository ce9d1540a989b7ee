#include "footcast/metrics.hpp"

#include <cmath>

namespace footcast {

namespace {

void require(std::span<const OutcomeProbs> items) {
  if (items.empty()) throw EmptyInput();
}

double indicator(const OutcomeProbs& item, int r) { return static_cast<int>(item.observed) == r ? 1.0 : 0.0; }

}  // namespace

double brier(std::span<const OutcomeProbs> items) {
  require(items);
  double total = 0;
  for (const auto& item : items) {
    for (int r = 0; r < 3; ++r) {
      const double d = item.p[r] - indicator(item, r);
      total += d * d;
    }
  }
  return total / static_cast<double>(items.size());
}

double acp(std::span<const OutcomeProbs> items) {
  require(items);
  double total = 0;
  for (const auto& item : items) total += item.observed_prob();
  return total / static_cast<double>(items.size());
}

double rps(std::span<const OutcomeProbs> items) {
  require(items);
  double total = 0;
  for (const auto& item : items) {
    double cp = 0, co = 0, sum = 0;
    for (int r = 0; r < 2; ++r) {
      cp += item.p[r];
      co += indicator(item, r);
      sum += (cp - co) * (cp - co);
    }
    total += 0.5 * sum;
  }
  return total / static_cast<double>(items.size());
}

double pseudo_r2(std::span<const OutcomeProbs> items, bool* zero) {
  require(items);
  if (zero) *zero = false;
  double log_total = 0;
  for (const auto& item : items) {
    const double p = item.observed_prob();
    if (p <= 0) {
      if (zero) *zero = true;
      return 0.0;
    }
    log_total += std::log(p);
  }
  return std::exp(log_total / static_cast<double>(items.size()));
}

MetricReport evaluate(std::span<const OutcomeProbs> items) {
  MetricReport out;
  out.brier = brier(items);
  out.acp = acp(items);
  out.rps = rps(items);
  out.pseudo_r2 = pseudo_r2(items, &out.zero_probability);
  out.n_matches = static_cast<int>(items.size());
  return out;
}

}  // namespace footcast
