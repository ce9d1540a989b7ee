#pragma once

#include "footcast/data.hpp"
#include "footcast/parameter_space.hpp"
#include "footcast/sampler.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace footcast {

class UnknownTeam : public std::invalid_argument {
 public:
  explicit UnknownTeam(const std::string& team) : std::invalid_argument("unknown team '" + team + "'") {}
};

class PeriodOutOfRange : public std::out_of_range {
 public:
  PeriodOutOfRange(int period, int n_periods)
      : std::out_of_range("period " + std::to_string(period) + " outside 1.." + std::to_string(n_periods)) {}
};

struct Fixture {
  int home_team = 0;
  int away_team = 0;
  int period = 1;  // 1-based
};

Fixture make_fixture(const TeamRegistry& registry, std::string_view home, std::string_view away, int period);

struct FixtureForecast {
  double p_home = 0;
  double p_draw = 0;
  double p_away = 0;
  int grid_bound = 0;         // K
  double tail_mass = 0;       // draw-averaged mass outside the grid
  Eigen::MatrixXd score_grid; // (K+1) x (K+1), count families only
  Eigen::VectorXd diff_dist;  // entries for -K..K, difference families only
};

struct ForecastSet {
  std::vector<FixtureForecast> fixtures;
};

struct ForecastOptions {
  int initial_bound = 15;
  int max_bound = 240;
  double tail_tolerance = 1e-6;
  bool keep_grids = true;
};

/// Posterior predictive outcome probabilities: the family pmf is averaged over draws on
/// a score grid (count families) or goal-difference grid (Skellam families), doubling
/// the grid bound until the averaged tail mass falls below the tolerance.
ForecastSet forecast(const ParameterSpace& space, std::span<const ParameterView> draws,
                     std::span<const Fixture> fixtures, const ForecastOptions& options = {});

ForecastSet forecast(const ParameterSpace& space, const PosteriorDraws& draws, std::span<const Fixture> fixtures,
                     const ForecastOptions& options = {});

std::vector<ParameterView> constrain_draws(const ParameterSpace& space, const PosteriorDraws& draws);

struct AbilityRow {
  int team = 0;
  int period = 1;  // 1-based
  std::string type;  // "att" or "def"
  double mean = 0;
  double q025 = 0;
  double q25 = 0;
  double q75 = 0;
  double q975 = 0;
};

/// Posterior mean and type-7 quantiles of every team's attack and defence per period,
/// ordered by type, team, then period.
std::vector<AbilityRow> summarize_abilities(const ParameterSpace& space, std::span<const ParameterView> draws);

}  // namespace footcast
