#include "footcast/predict.hpp"

#include "footcast/numeric.hpp"

#include <algorithm>

namespace footcast {

Fixture make_fixture(const TeamRegistry& registry, std::string_view home, std::string_view away, int period) {
  const auto h = registry.find(home);
  if (!h) throw UnknownTeam(std::string(home));
  const auto a = registry.find(away);
  if (!a) throw UnknownTeam(std::string(away));
  return {*h, *a, period};
}

namespace {

void check_fixture(const ParameterSpace& space, const Fixture& f) {
  const ModelSpec& spec = space.spec();
  for (int team : {f.home_team, f.away_team}) {
    if (team < 0 || team >= spec.n_teams) throw UnknownTeam("#" + std::to_string(team));
  }
  if (f.period < 1 || f.period > spec.n_periods) throw PeriodOutOfRange(f.period, spec.n_periods);
}

FixtureForecast count_forecast(const ModelSpec& spec, std::span<const ParameterView> draws, const Fixture& f,
                               const ForecastOptions& opt) {
  const double n_draws = static_cast<double>(draws.size());
  for (int k = opt.initial_bound;; k = std::min(2 * k, opt.max_bound)) {
    Eigen::MatrixXd grid = Eigen::MatrixXd::Zero(k + 1, k + 1);
    Eigen::MatrixXd cell(k + 1, k + 1);
    for (const auto& v : draws) {
      const auto rates = v.rates(spec.family, f.home_team, f.away_team, f.period - 1);
      const FamilyParams fp = v.family_params(spec.family);
      for (int x = 0; x <= k; ++x) {
        for (int y = 0; y <= k; ++y) cell(x, y) = std::exp(log_pmf(x, y, rates, fp));
      }
      grid += cell;
    }
    grid /= n_draws;
    const double mass = grid.sum();
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail < opt.tail_tolerance || k >= opt.max_bound) {
      FixtureForecast out;
      out.grid_bound = k;
      out.tail_mass = tail;
      double home = 0, draw = 0, away = 0;
      for (int x = 0; x <= k; ++x) {
        for (int y = 0; y <= k; ++y) (x > y ? home : x == y ? draw : away) += grid(x, y);
      }
      out.p_home = home / mass;
      out.p_draw = draw / mass;
      out.p_away = away / mass;
      if (opt.keep_grids) out.score_grid = std::move(grid);
      return out;
    }
  }
}

FixtureForecast difference_forecast(const ModelSpec& spec, std::span<const ParameterView> draws, const Fixture& f,
                                    const ForecastOptions& opt) {
  const double n_draws = static_cast<double>(draws.size());
  for (int k = opt.initial_bound;; k = std::min(2 * k, opt.max_bound)) {
    Eigen::VectorXd dist = Eigen::VectorXd::Zero(2 * k + 1);
    for (const auto& v : draws) {
      const auto rates = v.rates(spec.family, f.home_team, f.away_team, f.period - 1);
      const FamilyParams fp = v.family_params(spec.family);
      for (int z = -k; z <= k; ++z) dist(z + k) += std::exp(log_pmf(std::max(z, 0), std::max(-z, 0), rates, fp));
    }
    dist /= n_draws;
    const double mass = dist.sum();
    const double tail = std::max(0.0, 1.0 - mass);
    if (tail < opt.tail_tolerance || k >= opt.max_bound) {
      FixtureForecast out;
      out.grid_bound = k;
      out.tail_mass = tail;
      out.p_away = dist.head(k).sum() / mass;
      out.p_draw = dist(k) / mass;
      out.p_home = dist.tail(k).sum() / mass;
      if (opt.keep_grids) out.diff_dist = std::move(dist);
      return out;
    }
  }
}

}  // namespace

ForecastSet forecast(const ParameterSpace& space, std::span<const ParameterView> draws,
                     std::span<const Fixture> fixtures, const ForecastOptions& options) {
  if (draws.empty()) throw std::invalid_argument("forecast needs at least one posterior draw");
  if (options.initial_bound < 1 || options.max_bound < options.initial_bound) {
    throw std::invalid_argument("invalid grid bounds");
  }
  for (const auto& f : fixtures) check_fixture(space, f);
  const ModelSpec& spec = space.spec();
  ForecastSet out;
  out.fixtures.reserve(fixtures.size());
  for (const auto& f : fixtures) {
    out.fixtures.push_back(models_difference(spec.family) ? difference_forecast(spec, draws, f, options)
                                                          : count_forecast(spec, draws, f, options));
  }
  return out;
}

std::vector<ParameterView> constrain_draws(const ParameterSpace& space, const PosteriorDraws& draws) {
  std::vector<ParameterView> out;
  out.reserve(static_cast<std::size_t>(draws.n_chains() * draws.n_samples()));
  for (const auto& chain : draws.chains) {
    for (Eigen::Index s = 0; s < chain.draws.rows(); ++s) out.push_back(space.constrain(chain.draws.row(s).transpose()));
  }
  return out;
}

ForecastSet forecast(const ParameterSpace& space, const PosteriorDraws& draws, std::span<const Fixture> fixtures,
                     const ForecastOptions& options) {
  const auto views = constrain_draws(space, draws);
  return forecast(space, views, fixtures, options);
}

std::vector<AbilityRow> summarize_abilities(const ParameterSpace& space, std::span<const ParameterView> draws) {
  if (draws.empty()) throw std::invalid_argument("summarize_abilities needs at least one draw");
  const ModelSpec& spec = space.spec();
  const Eigen::Index n = static_cast<Eigen::Index>(draws.size());
  std::vector<AbilityRow> rows;
  Eigen::VectorXd values(n);
  for (const char* type : {"att", "def"}) {
    const bool att = type[0] == 'a';
    for (int team = 0; team < spec.n_teams; ++team) {
      for (int p = 0; p < spec.n_periods; ++p) {
        for (Eigen::Index s = 0; s < n; ++s) {
          const auto& v = draws[static_cast<std::size_t>(s)];
          values(s) = att ? v.att(team, p) : v.def(team, p);
        }
        // deviations from the first draw keep a constant column exactly constant
        const double base = values(0);
        AbilityRow row{team, p + 1, type, base + (values.array() - base).mean(), 0, 0, 0, 0};
        std::sort(values.data(), values.data() + n);
        row.q025 = sorted_quantile(values, 0.025);
        row.q25 = sorted_quantile(values, 0.25);
        row.q75 = sorted_quantile(values, 0.75);
        row.q975 = sorted_quantile(values, 0.975);
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

}  // namespace footcast
