#pragma once

#include <array>
#include <span>
#include <stdexcept>

namespace footcast {

class EmptyInput : public std::invalid_argument {
 public:
  EmptyInput() : std::invalid_argument("metrics need at least one forecast") {}
};

enum class Outcome { home_win = 0, draw = 1, away_win = 2 };

constexpr Outcome outcome_of(int home_goals, int away_goals) {
  return home_goals > away_goals ? Outcome::home_win : home_goals == away_goals ? Outcome::draw : Outcome::away_win;
}

/// Forecast probabilities ordered home win, draw, away win, plus the observed outcome.
struct OutcomeProbs {
  std::array<double, 3> p{};
  Outcome observed = Outcome::home_win;

  double observed_prob() const { return p[static_cast<int>(observed)]; }
};

struct MetricReport {
  double brier = 0;
  double acp = 0;
  double rps = 0;
  double pseudo_r2 = 0;
  int n_matches = 0;
  bool zero_probability = false;  // some observed outcome had probability 0
};

double brier(std::span<const OutcomeProbs> items);
double acp(std::span<const OutcomeProbs> items);
double rps(std::span<const OutcomeProbs> items);
/// Geometric mean of observed-outcome probabilities, accumulated in log space.
/// Sets `*zero` when an exact zero short-circuits the result.
double pseudo_r2(std::span<const OutcomeProbs> items, bool* zero = nullptr);

MetricReport evaluate(std::span<const OutcomeProbs> items);

}  // namespace footcast
