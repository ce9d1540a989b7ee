#include "footcast/simulate.hpp"

#include <chrono>
#include <cstdio>
#include <random>

namespace footcast {

void SimulationConfig::validate() const {
  if (n_teams < 2 || n_teams % 2 != 0) throw std::invalid_argument("simulation needs an even number of teams >= 2");
  if (n_periods < 1) throw std::invalid_argument("simulation needs at least one period");
  if (periods_per_season != 1 && periods_per_season != 2) {
    throw std::invalid_argument("periods_per_season must be 1 or 2");
  }
  if (!(ability_sd >= 0) || !(step_sd >= 0)) throw std::invalid_argument("standard deviations must be >= 0");
  if (!(gamma > 0) || !(xi > 0) || !(omega >= 0 && omega < 1)) {
    throw std::invalid_argument("family parameters out of range");
  }
}

std::vector<std::vector<std::pair<int, int>>> double_round_robin(int n) {
  std::vector<int> ring(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) ring[static_cast<std::size_t>(i)] = i;
  std::vector<std::vector<std::pair<int, int>>> first;
  for (int r = 0; r < n - 1; ++r) {
    std::vector<std::pair<int, int>> round;
    for (int i = 0; i < n / 2; ++i) {
      int a = ring[static_cast<std::size_t>(i)];
      int b = ring[static_cast<std::size_t>(n - 1 - i)];
      if ((r + i) % 2 == 1) std::swap(a, b);
      round.emplace_back(a, b);
    }
    first.push_back(std::move(round));
    // rotate everything except the first slot
    const int last = ring.back();
    for (int i = n - 1; i > 1; --i) ring[static_cast<std::size_t>(i)] = ring[static_cast<std::size_t>(i - 1)];
    ring[1] = last;
  }
  auto rounds = first;
  for (const auto& round : first) {
    std::vector<std::pair<int, int>> back;
    for (const auto& [h, a] : round) back.emplace_back(a, h);
    rounds.push_back(std::move(back));
  }
  return rounds;
}

std::pair<int, int> draw_score(const ScoringRates<double>& r, const FamilyParams& p, std::mt19937_64& rng) {
  auto poisson = [&rng](double rate) { return rate > 0 ? std::poisson_distribution<int>(rate)(rng) : 0; };
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (p.family) {
    case Family::dp:
    case Family::sm: return {poisson(r.lambda1), poisson(r.lambda2)};
    case Family::bp: {
      const int shared = poisson(r.lambda3);
      return {poisson(r.lambda1) + shared, poisson(r.lambda2) + shared};
    }
    case Family::dibp: {
      if (unif(rng) < p.omega) {
        const int goals = poisson(p.xi);
        return {goals, goals};
      }
      const int shared = poisson(r.lambda3);
      return {poisson(r.lambda1) + shared, poisson(r.lambda2) + shared};
    }
    case Family::nb: {
      auto negbin = [&](double mean) {
        std::gamma_distribution<double> mix(1.0 / p.gamma, p.gamma * mean);
        return poisson(mix(rng));
      };
      return {negbin(r.lambda1), negbin(r.lambda2)};
    }
    case Family::zism: {
      if (unif(rng) < p.omega) {
        const int goals = poisson(0.5 * (r.lambda1 + r.lambda2));
        return {goals, goals};
      }
      return {poisson(r.lambda1), poisson(r.lambda2)};
    }
  }
  return {0, 0};
}

Simulation simulate_league(const SimulationConfig& c) {
  c.validate();
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const int n = c.n_teams;
  const int t = c.n_periods;

  Simulation sim;
  for (int i = 0; i < n; ++i) {
    char name[16];
    std::snprintf(name, sizeof name, "Team%02d", i + 1);
    sim.teams.emplace_back(name);
  }

  ParameterView& v = sim.truth;
  v.beta0 = c.beta0;
  v.home = c.home;
  v.eta0 = c.eta0;
  v.gamma = c.gamma;
  v.omega = c.omega;
  v.xi = c.xi;
  v.att.resize(n, t);
  v.def.resize(n, t);
  for (Eigen::MatrixXd* m : {&v.att, &v.def}) {
    for (int i = 0; i < n; ++i) (*m)(i, 0) = c.ability_sd * normal(rng);
    for (int p = 1; p < t; ++p) {
      for (int i = 0; i < n; ++i) (*m)(i, p) = (*m)(i, p - 1) + c.step_sd * normal(rng);
    }
    m->rowwise() -= m->colwise().mean();
  }
  const double precision = c.step_sd > 0 ? 1.0 / (c.step_sd * c.step_sd) : 1e12;
  v.sigma = v.sigma_att = v.sigma_def = precision;
  v.phi_att = Eigen::VectorXd::Constant(std::max(t - 1, 0), precision);
  v.phi_def = v.phi_att;

  const auto schedule = double_round_robin(n);
  const FamilyParams fp = v.family_params(c.family);
  using namespace std::chrono;
  sys_days day = year{2000} / August / 5;
  for (int p = 0; p < t; ++p) {
    const int season = p / c.periods_per_season;
    const int round_offset = (p % c.periods_per_season) * static_cast<int>(schedule.size());
    if (p % c.periods_per_season == 0 && p > 0) day += days{60};
    for (std::size_t r = 0; r < schedule.size(); ++r) {
      for (const auto& [h, a] : schedule[r]) {
        const auto rates = v.rates(c.family, h, a, p);
        const auto [x, y] = draw_score(rates, fp, rng);
        MatchRecord m;
        m.date = year_month_day{day};
        m.home_team = sim.teams[static_cast<std::size_t>(h)];
        m.away_team = sim.teams[static_cast<std::size_t>(a)];
        m.home_goals = x;
        m.away_goals = y;
        m.season = "S" + std::to_string(season + 1);
        m.round = round_offset + static_cast<int>(r) + 1;
        sim.matches.push_back(std::move(m));
      }
      day += days{7};
    }
  }
  return sim;
}

}  // namespace footcast
