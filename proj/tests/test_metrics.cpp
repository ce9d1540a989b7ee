#include "footcast/metrics.hpp"

#include <doctest.h>

#include <random>
#include <vector>

using namespace footcast;

namespace {
OutcomeProbs item(double h, double d, double a, Outcome o) { return {{h, d, a}, o}; }
}  // namespace

TEST_CASE("hand-computed values") {
  const std::vector<OutcomeProbs> perfect{item(1, 0, 0, Outcome::home_win)};
  CHECK(brier(perfect) == 0.0);
  CHECK(acp(perfect) == 1.0);
  CHECK(rps(perfect) == 0.0);
  CHECK(pseudo_r2(perfect) == 1.0);

  const std::vector<OutcomeProbs> uniform{item(1.0 / 3, 1.0 / 3, 1.0 / 3, Outcome::home_win)};
  CHECK(brier(uniform) == doctest::Approx(2.0 / 3).epsilon(1e-12));
  CHECK(rps(uniform) == doctest::Approx(5.0 / 18).epsilon(1e-12));
  CHECK(acp(uniform) == doctest::Approx(1.0 / 3).epsilon(1e-12));

  CHECK(brier(std::vector{item(0, 1, 0, Outcome::home_win)}) == 2.0);
  CHECK(rps(std::vector{item(0, 1, 0, Outcome::home_win)}) == 0.5);
  CHECK(rps(std::vector{item(0, 0, 1, Outcome::home_win)}) == 1.0);

  const std::vector<OutcomeProbs> two{item(0.2, 0.5, 0.3, Outcome::home_win), item(0.1, 0.3, 0.6, Outcome::away_win)};
  CHECK(acp(two) == doctest::Approx(0.4).epsilon(1e-12));

  const std::vector<OutcomeProbs> geo{item(0.25, 0.5, 0.25, Outcome::home_win), item(0, 1, 0, Outcome::draw)};
  CHECK(pseudo_r2(geo) == doctest::Approx(0.5).epsilon(1e-12));

  bool zero = false;
  CHECK(pseudo_r2(std::vector{item(0, 1, 0, Outcome::home_win), item(1, 0, 0, Outcome::home_win)}, &zero) == 0.0);
  CHECK(zero);
}

TEST_CASE("empty input") {
  const std::vector<OutcomeProbs> none;
  CHECK_THROWS_AS(brier(none), EmptyInput);
  CHECK_THROWS_AS(acp(none), EmptyInput);
  CHECK_THROWS_AS(rps(none), EmptyInput);
  CHECK_THROWS_AS(pseudo_r2(none), EmptyInput);
}

TEST_CASE("properties on random forecasts") {
  std::mt19937_64 rng(2);
  std::gamma_distribution<double> g(1.0, 1.0);
  std::uniform_int_distribution<int> o(0, 2);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<OutcomeProbs> items;
    for (int m = 0; m < 20; ++m) {
      double a = g(rng), b = g(rng), c = g(rng);
      const double s = a + b + c;
      items.push_back(item(a / s, b / s, c / s, static_cast<Outcome>(o(rng))));
    }
    const auto r = evaluate(items);
    CHECK(r.acp >= r.pseudo_r2);
    CHECK(r.brier >= 0);
    CHECK(r.brier <= 2);
    CHECK(r.rps >= 0);
    CHECK(r.rps <= 1);
    std::shuffle(items.begin(), items.end(), rng);
    const auto s = evaluate(items);
    CHECK(s.brier == doctest::Approx(r.brier).epsilon(1e-14));
    CHECK(s.rps == doctest::Approx(r.rps).epsilon(1e-14));
    CHECK(s.pseudo_r2 == doctest::Approx(r.pseudo_r2).epsilon(1e-14));
  }
  // equal observed probabilities: AM equals GM
  std::vector<OutcomeProbs> same(5, item(0.4, 0.35, 0.25, Outcome::home_win));
  CHECK(acp(same) == doctest::Approx(pseudo_r2(same)).epsilon(1e-14));
}

TEST_CASE("log-space accumulation does not underflow") {
  std::vector<OutcomeProbs> tiny(100000, item(1e-300, 0.5, 0.5 - 1e-300, Outcome::home_win));
  CHECK(pseudo_r2(tiny) == doctest::Approx(1e-300).epsilon(1e-9));
}

TEST_CASE("outcome of a score") {
  CHECK(outcome_of(2, 1) == Outcome::home_win);
  CHECK(outcome_of(0, 0) == Outcome::draw);
  CHECK(outcome_of(0, 3) == Outcome::away_win);
}
