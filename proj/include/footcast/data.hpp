#pragma once

#include <chrono>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace footcast {

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MissingColumn : public DataError {
 public:
  explicit MissingColumn(std::string name)
      : DataError("missing required column '" + name + "'"), column_(std::move(name)) {}
  const std::string& column() const noexcept { return column_; }

 private:
  std::string column_;
};

class BadRow : public DataError {
 public:
  BadRow(std::size_t line, const std::string& reason)
      : DataError("line " + std::to_string(line) + ": " + reason), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class OddTeamCount : public DataError {
 public:
  OddTeamCount(const std::string& season, std::size_t n)
      : DataError("season '" + season + "' has an odd number of teams (" + std::to_string(n) +
                  "); rounds cannot be inferred") {}
};

class EmptyHoldout : public DataError {
 public:
  using DataError::DataError;
};

struct MatchRecord {
  std::chrono::year_month_day date{};
  std::string home_team;
  std::string away_team;
  int home_goals = 0;
  int away_goals = 0;
  std::string season;
  int round = 0;  // 0 = not yet assigned
};

/// Parses a football-data.co.uk style CSV (Date,HomeTeam,AwayTeam,FTHG,FTAG; extra
/// columns ignored). Optional Round and Season columns are honoured; records without a
/// Season value get `season`.
std::vector<MatchRecord> parse_matches(std::istream& source, const std::string& season);

/// Parses DD/MM/YY or DD/MM/YYYY. Throws std::invalid_argument on malformed input.
std::chrono::year_month_day parse_date(std::string_view text);
std::string format_date(const std::chrono::year_month_day& date);

/// Fills in `round` for seasons without explicit rounds: matches sorted by date and
/// grouped N_T/2 per round. Records that already carry a round keep it.
std::vector<MatchRecord> assign_rounds(std::vector<MatchRecord> matches);

class TeamRegistry {
 public:
  TeamRegistry() = default;
  explicit TeamRegistry(std::vector<std::string> names);

  static TeamRegistry from_matches(const std::vector<MatchRecord>& matches);

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& names() const noexcept { return names_; }
  const std::string& name(int index) const { return names_.at(static_cast<std::size_t>(index)); }
  std::optional<int> find(std::string_view name) const;
  int index(std::string_view name) const;  // throws std::out_of_range

 private:
  std::vector<std::string> names_;
  std::map<std::string, int, std::less<>> index_;
};

/// Integer view of one match used by the likelihood; period is 0-based.
struct IndexedMatch {
  int home = 0;
  int away = 0;
  int period = 0;
  int home_goals = 0;
  int away_goals = 0;
};

enum class PeriodScheme { half_season, single };

struct PeriodizedDataset {
  std::vector<MatchRecord> matches;
  TeamRegistry registry;
  std::vector<int> period_of_match;  // 1-based, parallel to matches
  int n_periods = 0;
  std::vector<std::string> seasons;  // chronological

  std::vector<IndexedMatch> indexed() const;
  std::size_t size() const noexcept { return matches.size(); }
};

/// Orders seasons chronologically, splits each into halves at ceil(R/2) rounds, and
/// numbers periods across seasons. The result is independent of input row order.
PeriodizedDataset periodize(std::vector<MatchRecord> matches,
                            PeriodScheme scheme = PeriodScheme::half_season);

struct Scenario {
  enum class Kind { second_half, last_three_rounds, last_round, cutoff, none };
  Kind kind = Kind::last_round;
  int cutoff_round = 0;  // only for Kind::cutoff

  static Scenario parse(std::string_view text);
  std::string to_string() const;
};

struct HoldoutMatch {
  MatchRecord match;
  int period = 0;
};

struct FitSplit {
  PeriodizedDataset train;
  std::vector<HoldoutMatch> holdout;
  Scenario scenario;
};

/// Holds out matches of the most recent season beyond the scenario's round cutoff.
/// The training set keeps the full registry and period count.
FitSplit split_for_scenario(const PeriodizedDataset& dataset, const Scenario& scenario);

}  // namespace footcast
