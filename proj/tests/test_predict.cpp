#include "footcast/predict.hpp"

#include <doctest.h>

#include <random>

using namespace footcast;

namespace {

ParameterSpace space_for(Family f, int n = 4, int t = 2) {
  ModelSpec s;
  s.family = f;
  s.dynamics = t > 1 ? Dynamics::owen : Dynamics::fixed;
  s.n_teams = n;
  s.n_periods = t;
  return ParameterSpace(s);
}

ParameterView zero_view(const ParameterSpace& space) { return space.constrain(Eigen::VectorXd::Zero(space.dim())); }

std::vector<ParameterView> random_views(const ParameterSpace& space, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 0.4);
  // abilities drawn directly in every period, whatever the dynamics
  ModelSpec independent = space.spec();
  independent.dynamics = Dynamics::fixed;
  const ParameterSpace flat(independent);
  std::vector<ParameterView> out;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd theta(flat.dim());
    for (Eigen::Index j = 0; j < theta.size(); ++j) theta(j) = normal(rng);
    out.push_back(flat.constrain(theta));
  }
  return out;
}

}  // namespace

TEST_CASE("single draw with unit rates") {
  const auto space = space_for(Family::dp);
  const std::vector<ParameterView> draws{zero_view(space)};
  const std::vector<Fixture> fixtures{{0, 1, 1}};
  const auto out = forecast(space, draws, fixtures);
  // brute-force: sum_k Pois(k; 1)^2
  double draw = 0, term = std::exp(-1.0);
  for (int k = 0; k < 40; ++k) {
    draw += term * term;
    term /= (k + 1);
  }
  CHECK(out.fixtures[0].p_draw == doctest::Approx(draw).epsilon(1e-9));
  CHECK(out.fixtures[0].p_draw == doctest::Approx(0.3085083).epsilon(1e-6));
  CHECK(out.fixtures[0].p_home == doctest::Approx(out.fixtures[0].p_away).epsilon(1e-12));
}

TEST_CASE("probabilities and grid mass") {
  for (Family f : {Family::dp, Family::bp, Family::dibp, Family::nb, Family::sm, Family::zism}) {
    const auto space = space_for(f);
    const auto draws = random_views(space, 30, 3);
    const std::vector<Fixture> fixtures{{0, 1, 1}, {2, 3, 2}};
    const auto out = forecast(space, draws, fixtures);
    for (const auto& fx : out.fixtures) {
      CAPTURE(to_string(f));
      CHECK(fx.p_home + fx.p_draw + fx.p_away == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(fx.tail_mass < 1e-6);
      const double grid = models_difference(f) ? fx.diff_dist.sum() : fx.score_grid.sum();
      CHECK(grid + fx.tail_mass == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("grid enlarges for high-scoring fixtures") {
  const auto space = space_for(Family::dp);
  ParameterView v = zero_view(space);
  v.beta0 = std::log(9.0);
  const std::vector<ParameterView> draws{v};
  const std::vector<Fixture> fixtures{{0, 1, 1}};
  const auto out = forecast(space, draws, fixtures);
  CHECK(out.fixtures[0].grid_bound > 15);
  CHECK(out.fixtures[0].tail_mass < 1e-6);
  ForecastOptions bigger;
  bigger.initial_bound = 60;
  const auto wide = forecast(space, draws, fixtures, bigger);
  CHECK(std::abs(wide.fixtures[0].p_home - out.fixtures[0].p_home) < 1e-6);
}

TEST_CASE("draw order and duplication do not matter") {
  const auto space = space_for(Family::bp);
  auto draws = random_views(space, 20, 9);
  const std::vector<Fixture> fixtures{{1, 3, 2}};
  const auto a = forecast(space, draws, fixtures);
  std::reverse(draws.begin(), draws.end());
  const auto b = forecast(space, draws, fixtures);
  CHECK(a.fixtures[0].p_home == doctest::Approx(b.fixtures[0].p_home).epsilon(1e-13));

  const std::vector<ParameterView> one{draws[0]};
  const std::vector<ParameterView> many(7, draws[0]);
  const auto c = forecast(space, one, fixtures);
  const auto d = forecast(space, many, fixtures);
  CHECK(c.fixtures[0].p_draw == doctest::Approx(d.fixtures[0].p_draw).epsilon(1e-14));
}

TEST_CASE("fixture errors") {
  const auto space = space_for(Family::dp);
  const std::vector<ParameterView> draws{zero_view(space)};
  const std::vector<Fixture> late{{0, 1, 3}};
  CHECK_THROWS_AS(forecast(space, draws, late), PeriodOutOfRange);
  const std::vector<Fixture> ghost{{0, 9, 1}};
  CHECK_THROWS_AS(forecast(space, draws, ghost), UnknownTeam);
  const TeamRegistry reg({"A", "B"});
  CHECK_THROWS_AS(make_fixture(reg, "A", "Z", 1), UnknownTeam);
  CHECK(make_fixture(reg, "B", "A", 2).home_team == 1);
}

TEST_CASE("ability summaries") {
  const auto space = space_for(Family::dp, 3, 2);
  const std::vector<ParameterView> same(10, random_views(space, 1, 4)[0]);
  const auto rows = summarize_abilities(space, same);
  CHECK(rows.size() == 2 * 3 * 2);
  for (const auto& r : rows) {
    CHECK(r.q025 == r.mean);
    CHECK(r.q975 == r.mean);
  }

  const auto draws = random_views(space, 400, 5);
  const auto summary = summarize_abilities(space, draws);
  for (int p = 1; p <= 2; ++p) {
    double att = 0, def = 0;
    for (const auto& r : summary) {
      if (r.period != p) continue;
      (r.type == "att" ? att : def) += r.mean;
      CHECK(r.q025 <= r.q25);
      CHECK(r.q25 <= r.q75);
      CHECK(r.q75 <= r.q975);
    }
    CHECK(std::abs(att) < 1e-9);
    CHECK(std::abs(def) < 1e-9);
  }

  // independent standard normal draws on one free coordinate
  ModelSpec s;
  s.n_teams = 2;
  const ParameterSpace two(s);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<ParameterView> std_normal;
  for (int i = 0; i < 4000; ++i) {
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(two.dim());
    theta(two.att_index(0, 0)) = normal(rng);
    std_normal.push_back(two.constrain(theta));
  }
  const auto row = summarize_abilities(two, std_normal).front();
  CHECK(row.q025 == doctest::Approx(-1.96).epsilon(0.08 / 1.96));
  CHECK(row.q975 == doctest::Approx(1.96).epsilon(0.08 / 1.96));
}
