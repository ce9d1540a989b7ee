#include "footcast/data.hpp"
#include "footcast/simulate.hpp"

#include <doctest.h>

#include <sstream>

using namespace footcast;

namespace {

std::vector<MatchRecord> parse(const std::string& text, const std::string& season = "2425") {
  std::istringstream in(text);
  return parse_matches(in, season);
}

// double round robin for n teams, one round per day
std::string season_csv(int n, int year, int rounds_to_write = -1) {
  std::ostringstream out;
  out << "Div,Date,HomeTeam,AwayTeam,FTHG,FTAG,FTR\n";
  const auto rounds = double_round_robin(n);
  const int limit = rounds_to_write < 0 ? static_cast<int>(rounds.size()) : rounds_to_write;
  for (int r = 0; r < limit; ++r) {
    const int d = 1 + r % 28;
    const int m = 1 + r / 28;
    for (const auto& [h, a] : rounds[static_cast<std::size_t>(r)]) {
      out << "D1," << (d < 10 ? "0" : "") << d << "/" << (m < 10 ? "0" : "") << m << "/" << year << ",T" << h
          << ",T" << a << ",1,0,H\n";
    }
  }
  return out.str();
}

}  // namespace

TEST_CASE("direct field mapping") {
  const auto rows = parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n16/05/2025,Bayern Munich,Gladbach,2,0\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].home_team == "Bayern Munich");
  CHECK(rows[0].away_team == "Gladbach");
  CHECK(rows[0].home_goals == 2);
  CHECK(rows[0].away_goals == 0);
  CHECK(rows[0].season == "2425");
  CHECK(format_date(rows[0].date) == "16/05/2025");
}

TEST_CASE("header problems and bad rows") {
  try {
    parse("Date,HomeTeam,AwayTeam,FTAG\n16/05/2025,A,B,0\n");
    FAIL("expected MissingColumn");
  } catch (const MissingColumn& e) {
    CHECK(e.column() == "FTHG");
  }
  try {
    parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n16/05/2025,A,B,1,0\n17/05/2025,A,C,,0\n");
    FAIL("expected BadRow");
  } catch (const BadRow& e) {
    CHECK(e.line() == 3);
  }
  CHECK_THROWS_AS(parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n31/02/2025,A,B,1,0\n"), BadRow);
  CHECK_THROWS_AS(parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n01/02/2025,A,A,1,0\n"), BadRow);
  CHECK_THROWS_AS(parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n01/02/2025,A,B,-1,0\n"), BadRow);
}

TEST_CASE("dialect details") {
  const auto rows = parse("\xEF\xBB\xBF" "Date,HomeTeam,AwayTeam,FTHG,FTAG,Referee\r\n"
                          "01/08/98,\"Man United\",Leicester,2,2,\"Smith, J\"\r\n"
                          "\r\n,,,,,\r\n");
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].home_team == "Man United");
  CHECK(static_cast<int>(rows[0].date.year()) == 1998);
  CHECK(static_cast<int>(parse_date("01/08/24").year()) == 2024);
  CHECK_THROWS_AS(parse_date("2024-08-01"), std::invalid_argument);
}

TEST_CASE("rounds from chronological order") {
  auto rows = parse(season_csv(18, 2024, 2));
  rows = assign_rounds(rows);
  std::map<int, int> count;
  for (const auto& r : rows) ++count[r.round];
  CHECK(count.size() == 2);
  CHECK(count[1] == 9);
  CHECK(count[2] == 9);

  auto twenty = parse(season_csv(20, 2024));
  CHECK(twenty.size() == 380);
  twenty = assign_rounds(twenty);
  int max_round = 0;
  for (const auto& r : twenty) max_round = std::max(max_round, r.round);
  CHECK(max_round == 38);
}

TEST_CASE("odd team count") {
  auto rows = parse("Date,HomeTeam,AwayTeam,FTHG,FTAG\n01/08/2024,A,B,1,0\n02/08/2024,B,C,1,0\n");
  CHECK_THROWS_AS(assign_rounds(rows), OddTeamCount);
}

TEST_CASE("season column overrides the label") {
  const auto rows = parse("Date,HomeTeam,AwayTeam,FTHG,FTAG,Season\n01/08/2024,A,B,1,0,S2\n02/08/2024,C,D,1,0,\n");
  CHECK(rows[0].season == "S2");
  CHECK(rows[1].season == "2425");
}

TEST_CASE("explicit rounds win") {
  auto rows = parse("Date,HomeTeam,AwayTeam,FTHG,FTAG,Round\n01/08/2024,A,B,1,0,7\n02/08/2024,C,D,1,0,3\n");
  rows = assign_rounds(rows);
  CHECK(rows[0].round == 7);
  CHECK(rows[1].round == 3);
}

TEST_CASE("half-season periods") {
  // one 34-round season with explicit rounds
  std::vector<MatchRecord> matches;
  for (int r = 1; r <= 34; ++r) {
    MatchRecord m;
    m.date = std::chrono::year{2024} / std::chrono::August / 1;
    m.home_team = "A";
    m.away_team = "B";
    m.season = "2425";
    m.round = r;
    matches.push_back(m);
  }
  const auto data = periodize(matches);
  CHECK(data.n_periods == 2);
  for (std::size_t i = 0; i < data.size(); ++i) {
    CHECK(data.period_of_match[i] == (data.matches[i].round <= 17 ? 1 : 2));
  }

  // 38 rounds: round 20 falls in the second period
  for (auto& m : matches) m.round += 4;
  const auto d38 = periodize(matches);
  for (std::size_t i = 0; i < d38.size(); ++i) {
    if (d38.matches[i].round == 20) CHECK(d38.period_of_match[i] == 2);
    if (d38.matches[i].round == 19) CHECK(d38.period_of_match[i] == 1);
  }
}

TEST_CASE("seasons numbered chronologically and order-independent") {
  std::vector<MatchRecord> all;
  for (int s = 0; s < 5; ++s) {
    auto rows = parse(season_csv(4, 2020 + s), "S" + std::to_string(4 - s));
    all.insert(all.end(), rows.begin(), rows.end());
  }
  const auto data = periodize(all);
  CHECK(data.n_periods == 10);
  CHECK(data.seasons.front() == "S4");
  std::reverse(all.begin(), all.end());
  const auto again = periodize(all);
  CHECK(again.period_of_match == data.period_of_match);
  for (std::size_t i = 0; i < data.size(); ++i) CHECK(again.matches[i].home_team == data.matches[i].home_team);
  // periods contiguous and monotone in chronological order
  for (std::size_t i = 1; i < data.size(); ++i) CHECK(data.period_of_match[i] >= data.period_of_match[i - 1]);
}

TEST_CASE("registry is lexicographic") {
  TeamRegistry reg({"Wolves", "Arsenal", "Chelsea", "Arsenal"});
  CHECK(reg.size() == 3);
  CHECK(reg.index("Arsenal") == 0);
  CHECK(reg.name(2) == "Wolves");
  CHECK_FALSE(reg.find("Spurs"));
  CHECK_THROWS_AS(reg.index("Spurs"), std::out_of_range);
}

TEST_CASE("scenario splits") {
  auto rows = parse(season_csv(18, 2024));
  const auto data = periodize(rows);
  const auto last3 = split_for_scenario(data, Scenario::parse("last3"));
  CHECK(last3.holdout.size() == 27);
  CHECK(last3.train.size() + last3.holdout.size() == data.size());
  CHECK(last3.train.n_periods == data.n_periods);
  for (const auto& h : last3.holdout) {
    CHECK(h.match.round > 31);
    CHECK(h.period == 2);
  }
  CHECK(split_for_scenario(data, Scenario::parse("last1")).holdout.size() == 9);
  CHECK(split_for_scenario(data, Scenario::parse("second-half")).holdout.size() == 17 * 9);
  CHECK(split_for_scenario(data, Scenario::parse("none")).holdout.empty());
  CHECK_THROWS_AS(split_for_scenario(data, Scenario::parse("cutoff=34")), EmptyHoldout);
  CHECK_THROWS_AS(Scenario::parse("halfway"), std::invalid_argument);
  CHECK(Scenario::parse("cutoff=12").to_string() == "cutoff=12");
}
