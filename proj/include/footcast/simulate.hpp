#pragma once

#include "footcast/data.hpp"
#include "footcast/parameter_space.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace footcast {

struct SimulationConfig {
  Family family = Family::dp;
  int n_teams = 18;
  int n_periods = 2;
  int periods_per_season = 2;
  std::uint64_t seed = 1;
  double beta0 = 0.15;
  double home = 0.25;
  double ability_sd = 0.3;  // period-1 abilities
  double step_sd = 0.2;     // period-to-period shocks; 0 keeps abilities identical
  double eta0 = -1.6094379124341003;  // log 0.2
  double gamma = 0.1;
  double omega = 0.1;
  double xi = 1.0;

  void validate() const;  // throws std::invalid_argument
};

struct Simulation {
  std::vector<MatchRecord> matches;  // seasons "S1", "S2", ... with explicit rounds
  ParameterView truth;
  std::vector<std::string> teams;
};

/// Every period is a full double round robin (circle method), so a period holds
/// n_teams (n_teams - 1) matches. Abilities start N(0, ability_sd^2), take
/// N(0, step_sd^2) shocks between periods, and are centred within each period.
Simulation simulate_league(const SimulationConfig& config);

/// Draws one score from the family's generative model.
std::pair<int, int> draw_score(const ScoringRates<double>& rates, const FamilyParams& params, std::mt19937_64& rng);

/// Round-robin pairings: 2 (n - 1) rounds of n / 2 (home, away) pairs; every ordered
/// pair appears exactly once.
std::vector<std::vector<std::pair<int, int>>> double_round_robin(int n_teams);

}  // namespace footcast
