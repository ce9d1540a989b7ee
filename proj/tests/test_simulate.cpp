#include "footcast/data.hpp"
#include "footcast/simulate.hpp"

#include <doctest.h>

#include <set>

using namespace footcast;

TEST_CASE("double round robin schedule") {
  for (int n : {2, 4, 18, 20}) {
    const auto rounds = double_round_robin(n);
    CHECK(rounds.size() == static_cast<std::size_t>(2 * (n - 1)));
    std::set<std::pair<int, int>> seen;
    for (const auto& round : rounds) {
      std::set<int> playing;
      for (const auto& [h, a] : round) {
        CHECK(h != a);
        playing.insert(h);
        playing.insert(a);
        seen.insert({h, a});
      }
      CHECK(playing.size() == static_cast<std::size_t>(n));
    }
    CHECK(seen.size() == static_cast<std::size_t>(n * (n - 1)));
  }
}

TEST_CASE("league simulation") {
  SimulationConfig c;
  c.seed = 42;
  const auto sim = simulate_league(c);
  CHECK(sim.matches.size() == 2 * 306);
  const auto data = periodize(sim.matches);
  CHECK(data.n_periods == 2);
  int first = 0;
  for (int p : data.period_of_match) first += p == 1;
  CHECK(first == 306);
  CHECK(sim.truth.att.colwise().sum().cwiseAbs().maxCoeff() < 1e-12);

  const auto again = simulate_league(c);
  for (std::size_t i = 0; i < sim.matches.size(); ++i) CHECK(again.matches[i].home_goals == sim.matches[i].home_goals);

  c.step_sd = 0;
  const auto frozen = simulate_league(c);
  CHECK((frozen.truth.att.col(0) - frozen.truth.att.col(1)).cwiseAbs().maxCoeff() == 0.0);

  c.n_teams = 5;
  CHECK_THROWS_AS(simulate_league(c), std::invalid_argument);
}

TEST_CASE("generative means") {
  std::mt19937_64 rng(77);
  const ScoringRates<double> r{1.6, 1.1, 0.3};
  const int reps = 100000;
  for (Family f : {Family::dp, Family::bp, Family::nb}) {
    FamilyParams p;
    p.family = f;
    p.gamma = 0.2;
    double home = 0;
    for (int i = 0; i < reps; ++i) home += draw_score(r, p, rng).first;
    const double expected = f == Family::bp ? r.lambda1 + r.lambda3 : r.lambda1;
    CAPTURE(to_string(f));
    CHECK(home / reps == doctest::Approx(expected).epsilon(0.01));
  }
  FamilyParams inflated;
  inflated.family = Family::dibp;
  inflated.omega = 0.3;
  inflated.xi = 1.0;
  int ties = 0;
  for (int i = 0; i < reps; ++i) {
    const auto [x, y] = draw_score(r, inflated, rng);
    ties += x == y;
  }
  CHECK(static_cast<double>(ties) / reps > 0.3);
}
