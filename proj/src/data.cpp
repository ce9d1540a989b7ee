#include "footcast/data.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <tuple>

namespace footcast {

namespace {

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::optional<int> parse_int(std::string_view s) {
  s = trim(s);
  if (s.empty()) return std::nullopt;
  int value = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

struct SeasonKey {
  std::chrono::sys_days first;
  std::string label;
  auto operator<=>(const SeasonKey&) const = default;
};

std::vector<std::string> chronological_seasons(const std::vector<MatchRecord>& matches) {
  std::map<std::string, std::chrono::sys_days> first;
  for (const auto& m : matches) {
    const auto day = std::chrono::sys_days{m.date};
    auto [it, inserted] = first.try_emplace(m.season, day);
    if (!inserted && day < it->second) it->second = day;
  }
  std::vector<SeasonKey> keys;
  for (const auto& [label, day] : first) keys.push_back({day, label});
  std::sort(keys.begin(), keys.end());
  std::vector<std::string> out;
  for (auto& k : keys) out.push_back(std::move(k.label));
  return out;
}

auto chronological_key(const MatchRecord& m) {
  return std::tie(m.date, m.home_team, m.away_team, m.home_goals, m.away_goals);
}

}  // namespace

std::chrono::year_month_day parse_date(std::string_view text) {
  text = trim(text);
  const auto first = text.find('/');
  const auto second = first == std::string_view::npos ? first : text.find('/', first + 1);
  if (second == std::string_view::npos) throw std::invalid_argument("expected DD/MM/YY[YY]");
  const auto dd = parse_int(text.substr(0, first));
  const auto mm = parse_int(text.substr(first + 1, second - first - 1));
  const auto year_text = text.substr(second + 1);
  auto yy = parse_int(year_text);
  if (!dd || !mm || !yy) throw std::invalid_argument("non-numeric date component");
  if (year_text.size() == 2) {
    *yy += *yy < 70 ? 2000 : 1900;
  } else if (year_text.size() != 4) {
    throw std::invalid_argument("year must have 2 or 4 digits");
  }
  const std::chrono::year_month_day date{std::chrono::year{*yy},
                                         std::chrono::month{static_cast<unsigned>(*mm)},
                                         std::chrono::day{static_cast<unsigned>(*dd)}};
  if (!date.ok()) throw std::invalid_argument("invalid calendar date");
  return date;
}

std::string format_date(const std::chrono::year_month_day& date) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%02u/%02u/%04d", static_cast<unsigned>(date.day()),
                static_cast<unsigned>(date.month()), static_cast<int>(date.year()));
  return buf;
}

std::vector<MatchRecord> parse_matches(std::istream& source, const std::string& season) {
  std::string line;
  if (!std::getline(source, line)) throw MissingColumn("Date");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);

  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t, std::less<>> column;
  for (std::size_t i = 0; i < header.size(); ++i) column.emplace(std::string(trim(header[i])), i);

  auto require = [&](const char* name) {
    const auto it = column.find(name);
    if (it == column.end()) throw MissingColumn(name);
    return it->second;
  };
  const std::size_t c_date = require("Date");
  const std::size_t c_home = require("HomeTeam");
  const std::size_t c_away = require("AwayTeam");
  const std::size_t c_hg = require("FTHG");
  const std::size_t c_ag = require("FTAG");
  const auto round_it = column.find("Round");
  const std::optional<std::size_t> c_round =
      round_it == column.end() ? std::nullopt : std::optional{round_it->second};
  const auto season_it = column.find("Season");
  const std::optional<std::size_t> c_season =
      season_it == column.end() ? std::nullopt : std::optional{season_it->second};
  const std::size_t needed = std::max({c_date, c_home, c_away, c_hg, c_ag});

  std::vector<MatchRecord> out;
  std::size_t line_no = 1;
  while (std::getline(source, line)) {
    ++line_no;
    const auto fields = split_csv_line(line);
    if (std::all_of(fields.begin(), fields.end(),
                    [](const std::string& f) { return trim(f).empty(); })) {
      continue;
    }
    if (fields.size() <= needed) throw BadRow(line_no, "too few fields");

    MatchRecord rec;
    rec.season = season;
    if (c_season && *c_season < fields.size() && !trim(fields[*c_season]).empty()) {
      rec.season = std::string(trim(fields[*c_season]));
    }
    try {
      rec.date = parse_date(fields[c_date]);
    } catch (const std::invalid_argument& e) {
      throw BadRow(line_no, std::string("bad date '") + fields[c_date] + "': " + e.what());
    }
    rec.home_team = std::string(trim(fields[c_home]));
    rec.away_team = std::string(trim(fields[c_away]));
    if (rec.home_team.empty() || rec.away_team.empty()) throw BadRow(line_no, "empty team name");
    if (rec.home_team == rec.away_team) throw BadRow(line_no, "home and away team are identical");

    const auto hg = parse_int(fields[c_hg]);
    const auto ag = parse_int(fields[c_ag]);
    if (!hg || !ag) throw BadRow(line_no, "missing or unparseable goals");
    if (*hg < 0 || *ag < 0) throw BadRow(line_no, "negative goals");
    rec.home_goals = *hg;
    rec.away_goals = *ag;

    if (c_round && *c_round < fields.size() && !trim(fields[*c_round]).empty()) {
      const auto r = parse_int(fields[*c_round]);
      if (!r || *r < 1) throw BadRow(line_no, "round must be a positive integer");
      rec.round = *r;
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<MatchRecord> assign_rounds(std::vector<MatchRecord> matches) {
  std::map<std::string, std::vector<std::size_t>> by_season;
  for (std::size_t i = 0; i < matches.size(); ++i) by_season[matches[i].season].push_back(i);

  for (auto& [season, idx] : by_season) {
    const bool explicit_rounds =
        std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return matches[i].round > 0; });
    if (explicit_rounds) continue;

    std::set<std::string> teams;
    for (const std::size_t i : idx) {
      teams.insert(matches[i].home_team);
      teams.insert(matches[i].away_team);
    }
    if (teams.size() % 2 != 0) throw OddTeamCount(season, teams.size());
    const std::size_t per_round = teams.size() / 2;

    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return chronological_key(matches[a]) < chronological_key(matches[b]);
    });
    for (std::size_t k = 0; k < idx.size(); ++k) {
      if (matches[idx[k]].round == 0) matches[idx[k]].round = 1 + static_cast<int>(k / per_round);
    }
  }
  return matches;
}

TeamRegistry::TeamRegistry(std::vector<std::string> names) : names_(std::move(names)) {
  std::sort(names_.begin(), names_.end());
  names_.erase(std::unique(names_.begin(), names_.end()), names_.end());
  for (std::size_t i = 0; i < names_.size(); ++i) index_.emplace(names_[i], static_cast<int>(i));
}

TeamRegistry TeamRegistry::from_matches(const std::vector<MatchRecord>& matches) {
  std::vector<std::string> names;
  names.reserve(matches.size() * 2);
  for (const auto& m : matches) {
    names.push_back(m.home_team);
    names.push_back(m.away_team);
  }
  return TeamRegistry(std::move(names));
}

std::optional<int> TeamRegistry::find(std::string_view name) const {
  const auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

int TeamRegistry::index(std::string_view name) const {
  if (const auto i = find(name)) return *i;
  throw std::out_of_range("unknown team '" + std::string(name) + "'");
}

std::vector<IndexedMatch> PeriodizedDataset::indexed() const {
  std::vector<IndexedMatch> out;
  out.reserve(matches.size());
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& m = matches[i];
    out.push_back({registry.index(m.home_team), registry.index(m.away_team),
                   period_of_match[i] - 1, m.home_goals, m.away_goals});
  }
  return out;
}

PeriodizedDataset periodize(std::vector<MatchRecord> matches, PeriodScheme scheme) {
  PeriodizedDataset out;
  out.seasons = chronological_seasons(matches);
  out.registry = TeamRegistry::from_matches(matches);

  std::map<std::string, int> season_rank;
  for (std::size_t s = 0; s < out.seasons.size(); ++s) season_rank[out.seasons[s]] = static_cast<int>(s);

  if (scheme == PeriodScheme::half_season) matches = assign_rounds(std::move(matches));

  std::sort(matches.begin(), matches.end(), [&](const MatchRecord& a, const MatchRecord& b) {
    const int sa = season_rank.at(a.season);
    const int sb = season_rank.at(b.season);
    return std::tie(sa, a.round, a.date, a.home_team, a.away_team, a.home_goals, a.away_goals) <
           std::tie(sb, b.round, b.date, b.home_team, b.away_team, b.home_goals, b.away_goals);
  });

  std::map<std::string, int> max_round;
  for (const auto& m : matches) max_round[m.season] = std::max(max_round[m.season], m.round);

  out.period_of_match.reserve(matches.size());
  for (const auto& m : matches) {
    if (scheme == PeriodScheme::single) {
      out.period_of_match.push_back(1);
      continue;
    }
    const int total = max_round.at(m.season);
    const int first_half_end = (total + 1) / 2;
    out.period_of_match.push_back(2 * season_rank.at(m.season) + (m.round <= first_half_end ? 1 : 2));
  }
  out.n_periods = scheme == PeriodScheme::single ? (matches.empty() ? 0 : 1)
                                                 : 2 * static_cast<int>(out.seasons.size());
  out.matches = std::move(matches);
  return out;
}

Scenario Scenario::parse(std::string_view text) {
  Scenario s;
  if (text == "second-half") {
    s.kind = Kind::second_half;
  } else if (text == "last3" || text == "last-three-rounds") {
    s.kind = Kind::last_three_rounds;
  } else if (text == "last1" || text == "last-round") {
    s.kind = Kind::last_round;
  } else if (text == "none") {
    s.kind = Kind::none;
  } else if (text.starts_with("cutoff=")) {
    const auto r = parse_int(text.substr(7));
    if (!r || *r < 0) throw std::invalid_argument("cutoff must be a non-negative round number");
    s.kind = Kind::cutoff;
    s.cutoff_round = *r;
  } else {
    throw std::invalid_argument("unknown scenario '" + std::string(text) + "'");
  }
  return s;
}

std::string Scenario::to_string() const {
  switch (kind) {
    case Kind::second_half: return "second-half";
    case Kind::last_three_rounds: return "last3";
    case Kind::last_round: return "last1";
    case Kind::none: return "none";
    case Kind::cutoff: return "cutoff=" + std::to_string(cutoff_round);
  }
  return "?";
}

FitSplit split_for_scenario(const PeriodizedDataset& dataset, const Scenario& scenario) {
  FitSplit split;
  split.scenario = scenario;
  split.train.registry = dataset.registry;
  split.train.n_periods = dataset.n_periods;
  split.train.seasons = dataset.seasons;

  if (scenario.kind == Scenario::Kind::none) {
    split.train = dataset;
    return split;
  }
  if (dataset.seasons.empty()) throw EmptyHoldout("dataset is empty");

  const std::string& latest = dataset.seasons.back();
  int total = 0;
  for (const auto& m : dataset.matches) {
    if (m.season == latest) total = std::max(total, m.round);
  }

  int cutoff = 0;
  switch (scenario.kind) {
    case Scenario::Kind::second_half: cutoff = (total + 1) / 2; break;
    case Scenario::Kind::last_three_rounds: cutoff = total - 3; break;
    case Scenario::Kind::last_round: cutoff = total - 1; break;
    case Scenario::Kind::cutoff: cutoff = scenario.cutoff_round; break;
    case Scenario::Kind::none: break;
  }
  if (cutoff >= total) {
    throw EmptyHoldout("cutoff round " + std::to_string(cutoff) + " leaves no holdout matches (season " +
                       latest + " has " + std::to_string(total) + " rounds)");
  }

  for (std::size_t i = 0; i < dataset.matches.size(); ++i) {
    const auto& m = dataset.matches[i];
    if (m.season == latest && m.round > cutoff) {
      split.holdout.push_back({m, dataset.period_of_match[i]});
    } else {
      split.train.matches.push_back(m);
      split.train.period_of_match.push_back(dataset.period_of_match[i]);
    }
  }
  return split;
}

}  // namespace footcast
