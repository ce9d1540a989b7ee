#include "footcast/cli/commands.hpp"

#include "footcast/cli/archive.hpp"
#include "footcast/cli/run_config.hpp"
#include "footcast/diagnostics.hpp"
#include "footcast/metrics.hpp"
#include "footcast/posterior.hpp"
#include "footcast/predict.hpp"
#include "footcast/simulate.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#ifndef FOOTCAST_VERSION
#define FOOTCAST_VERSION "0.0.0"
#endif

namespace footcast::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- options

struct RunOptions {
  RunConfig config;
  std::string config_file;
  std::vector<std::string> data;
  std::string family = "bp";
  std::string dynamics = "weighted";
  std::string scenario = "last1";
  std::vector<std::string> hyper;
  bool progress = false;

  RunConfig resolve() const {
    RunConfig c = config;
    try {
      c.family = parse_family(family);
      c.dynamics = parse_dynamics(dynamics);
      c.scenario = Scenario::parse(scenario);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
    c.data.clear();
    for (const auto& d : data) c.data.push_back(DataSource::parse(d));
    for (const auto& kv : hyper) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw ConfigError("--hyper expects key=value, got '" + kv + "'");
      double value = 0;
      try {
        std::size_t used = 0;
        value = std::stod(kv.substr(eq + 1), &used);
        if (used != kv.size() - eq - 1) throw std::invalid_argument("trailing text");
      } catch (const std::exception&) {
        throw ConfigError("--hyper value for '" + kv.substr(0, eq) + "' is not a number");
      }
      c.hyper[kv.substr(0, eq)] = value;
    }
    c.validate();
    return c;
  }
};

void add_run_options(CLI::App& app, RunOptions& o) {
  app.add_option("--config", o.config_file, "Flat key=value configuration file; flags take precedence");
  app.add_option("--data", o.data, "Match CSV as path[:season]; repeat for several seasons");
  app.add_option("--league", o.config.league, "League label for reports")->capture_default_str();
  app.add_option("--family", o.family, "dp, bp, dibp, nb, sm or zism")->capture_default_str();
  app.add_option("--dynamics", o.dynamics, "static, owen, egidi or weighted")->capture_default_str();
  app.add_option("--scenario", o.scenario, "second-half, last3, last1, cutoff=N or none")->capture_default_str();
  app.add_option("--chains", o.config.sampler.n_chains, "Number of chains")->capture_default_str();
  app.add_option("--warmup", o.config.sampler.n_warmup, "Warmup iterations per chain")->capture_default_str();
  app.add_option("--samples", o.config.sampler.n_samples, "Kept iterations per chain")->capture_default_str();
  app.add_option("--seed", o.config.sampler.seed, "Random seed")->capture_default_str();
  app.add_option("--target-accept", o.config.sampler.target_accept, "Step-size adaptation target")
      ->capture_default_str();
  app.add_option("--max-depth", o.config.sampler.max_tree_depth, "Maximum tree depth")->capture_default_str();
  app.add_option("--init-jitter", o.config.sampler.init_jitter, "Initialisation spread")->capture_default_str();
  app.add_option("--threads", o.config.sampler.n_threads, "Worker threads (0 = one per chain)");
  app.add_option("--hyper", o.hyper, "Hyperparameter override key=value (repeatable)");
  app.add_option("--out", o.config.out, "Run directory")->capture_default_str();
  app.add_flag("--progress", o.progress, "Report sampling progress on stderr");
}

// Options named in the file are filled only when absent from the command line.
void apply_config_file(CLI::App& app, const std::string& path) {
  std::istringstream in(read_file(path));
  std::vector<std::pair<CLI::Option*, std::vector<std::string>>> given;
  std::size_t line_no = 0;
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.starts_with("--")) key.erase(0, 2);
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    CLI::Option* opt = key == "config" ? nullptr : app.get_option_no_throw("--" + key);
    if (!opt) throw ConfigError(path + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    const auto it = std::find_if(given.begin(), given.end(), [opt](const auto& g) { return g.first == opt; });
    if (it == given.end()) given.push_back({opt, {value}});
    else it->second.push_back(value);
  }
  for (auto& [opt, values] : given) {
    if (opt->count() > 0) continue;
    try {
      opt->add_result(values);
      opt->run_callback();
    } catch (const CLI::Error& e) {
      throw ConfigError(path + ": bad value for '" + opt->get_name() + "': " + e.what());
    }
  }
}

// ---------------------------------------------------------------- data

PeriodizedDataset load_dataset(const RunConfig& c) {
  std::vector<MatchRecord> all;
  for (const auto& d : c.data) {
    std::istringstream in(read_file(d.path));
    try {
      auto rows = parse_matches(in, d.season);
      all.insert(all.end(), rows.begin(), rows.end());
    } catch (const DataError& e) {
      throw DataError(d.path + ": " + e.what());
    }
  }
  if (all.empty()) throw DataError("no matches in the input files");
  return periodize(std::move(all), c.period_scheme());
}

std::vector<std::vector<std::string>> read_table(const fs::path& path, std::vector<std::string>& header) {
  std::istringstream in(read_file(path));
  std::string line;
  if (!std::getline(in, line)) throw DataError(path.string() + " is empty");
  auto split = [](const std::string& s) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : s) {
      if (c == '"') quoted = !quoted;
      else if (c == ',' && !quoted) out.push_back(std::exchange(field, {}));
      else if (c != '\r') field += c;
    }
    out.push_back(field);
    return out;
  };
  header = split(line);
  std::vector<std::vector<std::string>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (row.size() != header.size()) throw BadRow(line_no, path.string() + ": wrong number of fields");
    rows.push_back(std::move(row));
  }
  return rows;
}

std::size_t column(const std::vector<std::string>& header, const std::string& name, const fs::path& path) {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) throw DataError(path.string() + ": " + MissingColumn(name).what());
  return static_cast<std::size_t>(it - header.begin());
}

int to_int(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad " + what + " '" + s + "'");
  }
}

double to_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError("bad " + what + " '" + s + "'");
  }
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string quote(const std::string& s) {
  if (s.find_first_of(",\"") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

// ---------------------------------------------------------------- fit

int cmd_fit(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  using clock = std::chrono::steady_clock;
  const RunConfig c = opts.resolve();
  const fs::path dir(c.out);
  DirectoryLock lock(dir);
  json timings = json::object();
  auto phase = [&timings, start = clock::now()](const char* name) mutable {
    const auto now = clock::now();
    timings[name] = std::chrono::duration<double>(now - start).count();
    start = now;
  };

  const PeriodizedDataset data = load_dataset(c);
  const FitSplit split = split_for_scenario(data, c.scenario);
  ModelSpec spec;
  spec.family = c.family;
  spec.dynamics = c.dynamics;
  spec.n_teams = static_cast<int>(data.registry.size());
  spec.n_periods = data.n_periods;
  spec.hyper = c.hyper_params();
  ParameterSpace space = [&] {
    try {
      return ParameterSpace(spec);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }();
  const auto matches = split.train.indexed();
  phase("load");

  ProgressCallback progress;
  if (opts.progress) {
    progress = [&err](const ProgressEvent& e) {
      const int step = std::max(1, e.total / 10);
      if ((e.iteration + 1) % step == 0 || e.iteration + 1 == e.total) {
        err << "chain " << e.chain + 1 << ": " << e.iteration + 1 << "/" << e.total
            << (e.warmup ? " (warmup)" : " (sampling)") << "\n";
      }
    };
  }
  const PosteriorDraws draws = sample(make_posterior_target(space, matches), c.sampler, progress);
  phase("sample");

  const auto& teams = data.registry.names();
  const auto names = space.constrained_names(teams);
  std::vector<Eigen::MatrixXd> constrained;
  for (const auto& chain : draws.chains) {
    Eigen::MatrixXd m(chain.draws.rows(), space.constrained_dim());
    for (Eigen::Index s = 0; s < chain.draws.rows(); ++s) {
      m.row(s) = space.flatten(space.constrain(chain.draws.row(s).transpose())).transpose();
    }
    constrained.push_back(std::move(m));
  }
  const Diagnostics diag = compute_diagnostics(constrained, names, draws.total_divergences());
  const auto views = constrain_draws(space, draws);
  const auto abilities = summarize_abilities(space, views);
  phase("summaries");

  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("draws.csv", draws_csv(space, draws, teams));

  std::string d = "parameter,rhat,ess_bulk,ess_tail\n";
  for (const auto& p : diag.parameters) {
    d += quote(p.name) + "," + format_double(p.rhat) + "," + format_double(p.ess_bulk) + "," +
         format_double(p.ess_tail) + "\n";
  }
  files.emplace_back("diagnostics.csv", std::move(d));

  std::string a = "team,period,type,mean,q25,q75,q025,q975\n";
  for (const auto& r : abilities) {
    a += quote(teams[static_cast<std::size_t>(r.team)]) + "," + std::to_string(r.period) + "," + r.type + "," +
         format_double(r.mean) + "," + format_double(r.q25) + "," + format_double(r.q75) + "," +
         format_double(r.q025) + "," + format_double(r.q975) + "\n";
  }
  files.emplace_back("abilities.csv", std::move(a));

  std::string h = "match_id,date,home,away,home_goals,away_goals,period\n";
  for (std::size_t i = 0; i < split.holdout.size(); ++i) {
    const auto& m = split.holdout[i];
    h += std::to_string(i + 1) + "," + format_date(m.match.date) + "," + quote(m.match.home_team) + "," +
         quote(m.match.away_team) + "," + std::to_string(m.match.home_goals) + "," +
         std::to_string(m.match.away_goals) + "," + std::to_string(m.period) + "\n";
  }
  files.emplace_back("holdout.csv", std::move(h));

  json manifest;
  manifest["software"] = {{"name", "footcast"}, {"version", FOOTCAST_VERSION}};
  manifest["config_hash"] = config_hash(c);
  json cfg = json::object();
  std::istringstream canon(c.canonical());
  for (std::string line; std::getline(canon, line);) {
    const auto eq = line.find('=');
    const std::string key = line.substr(0, eq);
    if (key == "data") cfg["data"].push_back(line.substr(eq + 1));
    else cfg[key] = line.substr(eq + 1);
  }
  cfg["out"] = c.out;
  manifest["config"] = cfg;
  manifest["model"] = {{"league", c.league},
                       {"family", to_string(c.family)},
                       {"dynamics", to_string(c.dynamics)},
                       {"scenario", c.scenario.to_string()},
                       {"n_teams", spec.n_teams},
                       {"n_periods", spec.n_periods},
                       {"dim", space.dim()},
                       {"teams", teams},
                       {"seasons", data.seasons},
                       {"n_train", split.train.size()},
                       {"n_holdout", split.holdout.size()}};
  for (const auto& src : c.data) {
    manifest["data"].push_back({{"path", src.path}, {"season", src.season}, {"checksum", file_checksum(src.path)}});
  }
  manifest["diagnostics"] = {{"max_rhat", diag.max_rhat()},
                             {"min_ess_bulk", diag.min_ess_bulk()},
                             {"min_ess_tail", diag.min_ess_tail()},
                             {"divergences", diag.divergences}};
  for (const auto& [name, content] : files) {
    write_atomic(dir / name, content);
    manifest["files"].push_back({{"name", name}, {"checksum", hex64(fnv1a(content))}});
  }
  phase("write");
  manifest["timings_seconds"] = timings;
  write_atomic(dir / "manifest.json", manifest.dump(2) + "\n");

  out << "fit " << c.league << " " << to_string(c.family) << "/" << to_string(c.dynamics) << ": " << split.train.size()
      << " training matches, " << split.holdout.size() << " held out, max R-hat "
      << std::setprecision(4) << diag.max_rhat() << ", min bulk ESS " << std::setprecision(5) << diag.min_ess_bulk()
      << ", divergences " << diag.divergences << "\n";
  return kOk;
}

// ---------------------------------------------------------------- forecast

struct FittedModel {
  json manifest;
  ParameterSpace space;
  TeamRegistry registry;
  std::vector<ParameterView> draws;
};

FittedModel load_fit(const fs::path& dir) {
  json manifest = read_json(dir / "manifest.json");
  ModelSpec spec;
  try {
    const auto& m = manifest.at("model");
    spec.family = parse_family(m.at("family").get<std::string>());
    spec.dynamics = parse_dynamics(m.at("dynamics").get<std::string>());
    spec.n_teams = m.at("n_teams").get<int>();
    spec.n_periods = m.at("n_periods").get<int>();
  } catch (const json::exception& e) {
    throw DataError("manifest.json: " + std::string(e.what()));
  }
  ParameterSpace space(spec);
  TeamRegistry registry(manifest["model"]["teams"].get<std::vector<std::string>>());
  const std::string text = read_file(dir / "draws.csv");
  const auto archive = parse_draws_csv(text);
  if (archive.names != space.constrained_names(registry.names())) {
    throw ArtifactMismatch("draws.csv columns do not match the fitted model");
  }
  std::vector<ParameterView> views;
  views.reserve(static_cast<std::size_t>(archive.values.rows()));
  for (Eigen::Index i = 0; i < archive.values.rows(); ++i) views.push_back(space.unflatten(archive.values.row(i).transpose()));
  return {std::move(manifest), std::move(space), std::move(registry), std::move(views)};
}

struct NamedFixture {
  std::string id;
  std::string home;
  std::string away;
  int period;
};

int cmd_forecast(const RunOptions& opts, const std::string& fixtures_path, std::string output, std::ostream& out) {
  const RunConfig c = opts.resolve();
  const fs::path dir(c.out);
  const FittedModel fit = load_fit(dir);
  const std::string expected = fit.manifest.value("config_hash", "");
  const std::string actual = config_hash(c);
  if (expected != actual) {
    throw ArtifactMismatch("fit in '" + c.out + "' was produced with config hash " + expected +
                           " but the current config hashes to " + actual);
  }

  std::vector<NamedFixture> named;
  const fs::path source = fixtures_path.empty() ? dir / "holdout.csv" : fs::path(fixtures_path);
  std::vector<std::string> header;
  const auto rows = read_table(source, header);
  const std::size_t c_home = column(header, "home", source);
  const std::size_t c_away = column(header, "away", source);
  const auto id_it = std::find(header.begin(), header.end(), "match_id");
  const auto period_it = std::find(header.begin(), header.end(), "period");
  const int last_period = fit.space.spec().n_periods;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    named.push_back({id_it == header.end() ? std::to_string(i + 1) : r[static_cast<std::size_t>(id_it - header.begin())],
                     r[c_home], r[c_away],
                     period_it == header.end() ? last_period
                                               : to_int(r[static_cast<std::size_t>(period_it - header.begin())], "period")});
  }
  std::vector<Fixture> fixtures;
  for (const auto& f : named) {
    const int period = c.period_scheme() == PeriodScheme::single ? 1 : f.period;
    fixtures.push_back(make_fixture(fit.registry, f.home, f.away, period));
  }

  ForecastOptions fo;
  fo.keep_grids = false;
  const ForecastSet set = forecast(fit.space, fit.draws, fixtures, fo);
  std::string csv = "match_id,home,away,p_home,p_draw,p_away\n";
  for (std::size_t i = 0; i < named.size(); ++i) {
    const auto& p = set.fixtures[i];
    csv += quote(named[i].id) + "," + quote(named[i].home) + "," + quote(named[i].away) + "," + format_double(p.p_home) +
           "," + format_double(p.p_draw) + "," + format_double(p.p_away) + "\n";
  }
  if (output.empty()) output = (dir / "forecast.csv").string();
  write_atomic(output, csv);
  out << "forecast: " << named.size() << " fixtures written to " << output << "\n";
  return kOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string forecast;
  std::string results;
  std::string output;
  std::string fit;
  std::string league, family, dynamics, scenario;
};

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  std::vector<std::string> fh, rh;
  const auto frows = read_table(o.forecast, fh);
  const auto rrows = read_table(o.results, rh);
  const std::size_t f_id = column(fh, "match_id", o.forecast);
  const std::size_t f_ph = column(fh, "p_home", o.forecast);
  const std::size_t f_pd = column(fh, "p_draw", o.forecast);
  const std::size_t f_pa = column(fh, "p_away", o.forecast);
  const std::size_t r_id = column(rh, "match_id", o.results);
  const std::size_t r_hg = column(rh, "home_goals", o.results);
  const std::size_t r_ag = column(rh, "away_goals", o.results);

  std::map<std::string, Outcome> observed;
  for (const auto& r : rrows) observed[r[r_id]] = outcome_of(to_int(r[r_hg], "home_goals"), to_int(r[r_ag], "away_goals"));

  std::vector<OutcomeProbs> items;
  for (const auto& r : frows) {
    const auto it = observed.find(r[f_id]);
    if (it == observed.end()) throw UnmatchedFixture("forecast row '" + r[f_id] + "' has no observed result");
    OutcomeProbs p{{to_real(r[f_ph], "p_home"), to_real(r[f_pd], "p_draw"), to_real(r[f_pa], "p_away")}, it->second};
    const double total = p.p[0] + p.p[1] + p.p[2];
    if (std::abs(total - 1.0) > 1e-9 || *std::min_element(p.p.begin(), p.p.end()) < 0) {
      throw DataError("forecast row '" + r[f_id] + "' is not a probability vector");
    }
    items.push_back(p);
  }
  if (items.empty()) throw DataError("forecast file has no rows");
  const MetricReport m = evaluate(items);

  json labels = {{"league", o.league}, {"family", o.family}, {"dynamics", o.dynamics}, {"scenario", o.scenario}};
  if (!o.fit.empty()) {
    const json manifest = read_json(fs::path(o.fit) / "manifest.json");
    for (const char* key : {"league", "family", "dynamics", "scenario"}) {
      if (labels[key].get<std::string>().empty()) labels[key] = manifest["model"].value(key, "");
    }
  }
  json report = {{"brier", m.brier},         {"acp", m.acp},
                 {"rps", m.rps},             {"pseudo_r2", m.pseudo_r2},
                 {"n_matches", m.n_matches}, {"zero_probability", m.zero_probability}};
  for (auto& [k, v] : labels.items()) report[k] = v;
  const std::string text = report.dump(2) + "\n";
  if (o.output.empty()) {
    out << text;
  } else {
    write_atomic(o.output, text);
    out << "evaluate: " << m.n_matches << " matches, brier " << format_double(m.brier) << " -> " << o.output << "\n";
  }
  return kOk;
}

// ---------------------------------------------------------------- compare

int cmd_compare(const std::vector<std::string>& reports, const std::string& output, std::ostream& out) {
  if (reports.size() < 2) throw ConfigError("compare needs at least two metric reports");
  struct Row {
    std::string league, family, dynamics, scenario;
    double brier, acp, rps, pseudo_r2;
    int n;
  };
  std::vector<Row> rows;
  for (const auto& path : reports) {
    const json j = read_json(path);
    try {
      rows.push_back({j.at("league").get<std::string>(), j.at("family").get<std::string>(),
                      j.at("dynamics").get<std::string>(), j.value("scenario", ""), j.at("brier").get<double>(),
                      j.at("acp").get<double>(), j.at("rps").get<double>(), j.at("pseudo_r2").get<double>(),
                      j.at("n_matches").get<int>()});
    } catch (const json::exception& e) {
      throw SchemaMismatch(path + ": " + e.what());
    }
  }
  std::map<std::string, std::array<double, 4>> best;  // lowest brier/rps, highest acp/pseudo_r2
  for (const auto& r : rows) {
    auto [it, fresh] = best.try_emplace(r.league, std::array<double, 4>{r.brier, r.acp, r.rps, r.pseudo_r2});
    if (fresh) continue;
    auto& b = it->second;
    b = {std::min(b[0], r.brier), std::max(b[1], r.acp), std::min(b[2], r.rps), std::max(b[3], r.pseudo_r2)};
  }
  auto same = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b)); };

  std::string csv =
      "league,family,dynamics,scenario,n_matches,brier,acp,rps,pseudo_r2,best_brier,best_acp,best_rps,best_pseudo_r2\n";
  std::ostringstream table;
  table << std::left << std::setw(14) << "league" << std::setw(8) << "family" << std::setw(10) << "dynamics"
        << std::setw(13) << "scenario" << std::right << std::setw(10) << "brier" << std::setw(10) << "acp"
        << std::setw(10) << "rps" << std::setw(11) << "pseudo_r2" << "\n";
  for (const auto& r : rows) {
    const auto& b = best.at(r.league);
    const bool flags[4] = {same(r.brier, b[0]), same(r.acp, b[1]), same(r.rps, b[2]), same(r.pseudo_r2, b[3])};
    csv += quote(r.league) + "," + r.family + "," + r.dynamics + "," + r.scenario + "," + std::to_string(r.n) + "," +
           format_double(r.brier) + "," + format_double(r.acp) + "," + format_double(r.rps) + "," +
           format_double(r.pseudo_r2);
    for (bool f : flags) csv += f ? ",1" : ",0";
    csv += "\n";
    auto cell = [&](double v, bool flag) {
      std::ostringstream s;
      s << std::fixed << std::setprecision(4) << v << (flag ? "*" : " ");
      return s.str();
    };
    table << std::left << std::setw(14) << r.league << std::setw(8) << r.family << std::setw(10) << r.dynamics
          << std::setw(13) << r.scenario << std::right << std::setw(10) << cell(r.brier, flags[0]) << std::setw(10)
          << cell(r.acp, flags[1]) << std::setw(10) << cell(r.rps, flags[2]) << std::setw(11)
          << cell(r.pseudo_r2, flags[3]) << "\n";
  }
  if (!output.empty()) write_atomic(output, csv);
  out << table.str() << "* best in league\n";
  return kOk;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  SimulationConfig sim;
  std::string family = "dp";
  std::string dynamics = "owen";
  std::string out = "simulated";
};

int cmd_simulate(SimulateOptions o, std::ostream& out) {
  try {
    o.sim.family = parse_family(o.family);
    const Dynamics dynamics = parse_dynamics(o.dynamics);
    if (dynamics == Dynamics::fixed) o.sim.step_sd = 0;
    o.sim.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const Simulation sim = simulate_league(o.sim);
  const fs::path dir(o.out);
  fs::create_directories(dir);

  std::string csv = "Date,HomeTeam,AwayTeam,FTHG,FTAG,Season,Round\n";
  for (const auto& m : sim.matches) {
    csv += format_date(m.date) + "," + m.home_team + "," + m.away_team + "," + std::to_string(m.home_goals) + "," +
           std::to_string(m.away_goals) + "," + m.season + "," + std::to_string(m.round) + "\n";
  }
  write_atomic(dir / "matches.csv", csv);

  const auto& v = sim.truth;
  std::string truth = "name,value\n";
  auto add = [&truth](const std::string& name, double value) { truth += name + "," + format_double(value) + "\n"; };
  add("beta0", v.beta0);
  add("home", v.home);
  if (has_eta0(o.sim.family)) add("eta0", v.eta0);
  if (has_gamma(o.sim.family)) add("gamma", v.gamma);
  if (has_omega(o.sim.family)) add("omega", v.omega);
  if (has_xi(o.sim.family)) add("xi", v.xi);
  for (const char* kind : {"att", "def"}) {
    const auto& m = kind[0] == 'a' ? v.att : v.def;
    for (Eigen::Index p = 0; p < m.cols(); ++p) {
      for (Eigen::Index i = 0; i < m.rows(); ++i) {
        add(std::string(kind) + "[" + sim.teams[static_cast<std::size_t>(i)] + "][" + std::to_string(p + 1) + "]", m(i, p));
      }
    }
  }
  add("step_precision", v.sigma);
  write_atomic(dir / "truth.csv", truth);
  out << "simulate: " << sim.matches.size() << " matches for " << sim.teams.size() << " teams over "
      << o.sim.n_periods << " periods -> " << (dir / "matches.csv").string() << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian football score models: fit, forecast and evaluate", "footcast"};
  app.require_subcommand(1);
  app.set_version_flag("--version", FOOTCAST_VERSION);

  RunOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "Sample the posterior and write draws, diagnostics and ability summaries");
  add_run_options(*fit, fit_opts);

  RunOptions fc_opts;
  std::string fixtures, fc_output;
  auto* fc = app.add_subcommand("forecast", "Outcome probabilities for held-out or listed fixtures");
  add_run_options(*fc, fc_opts);
  fc->add_option("--fixtures", fixtures, "CSV with home,away[,period][,match_id]; defaults to the holdout");
  fc->add_option("--output", fc_output, "Forecast CSV (default <out>/forecast.csv)");

  EvaluateOptions ev_opts;
  auto* ev = app.add_subcommand("evaluate", "Score a forecast against observed results");
  ev->add_option("--forecast", ev_opts.forecast, "Forecast CSV")->required();
  ev->add_option("--results", ev_opts.results, "Results CSV with match_id,home_goals,away_goals")->required();
  ev->add_option("--output", ev_opts.output, "Metrics JSON (default: stdout)");
  ev->add_option("--fit", ev_opts.fit, "Fit directory to copy labels from");
  ev->add_option("--league", ev_opts.league);
  ev->add_option("--family", ev_opts.family);
  ev->add_option("--dynamics", ev_opts.dynamics);
  ev->add_option("--scenario", ev_opts.scenario);

  std::vector<std::string> reports;
  std::string cmp_output;
  auto* cmp = app.add_subcommand("compare", "Tabulate metric reports and flag the best per league");
  cmp->add_option("reports", reports, "Metric JSON files")->required();
  cmp->add_option("--output", cmp_output, "Comparison CSV");

  SimulateOptions sim_opts;
  auto* sim = app.add_subcommand("simulate", "Generate a synthetic league with known parameters");
  sim->add_option("--family", sim_opts.family)->capture_default_str();
  sim->add_option("--dynamics", sim_opts.dynamics)->capture_default_str();
  sim->add_option("--teams", sim_opts.sim.n_teams)->capture_default_str();
  sim->add_option("--periods", sim_opts.sim.n_periods)->capture_default_str();
  sim->add_option("--seed", sim_opts.sim.seed)->capture_default_str();
  sim->add_option("--ability-sd", sim_opts.sim.ability_sd)->capture_default_str();
  sim->add_option("--step-sd", sim_opts.sim.step_sd)->capture_default_str();
  sim->add_option("--out", sim_opts.out)->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kConfigError;
  }

  try {
    if (*fit && !fit_opts.config_file.empty()) apply_config_file(*fit, fit_opts.config_file);
    if (*fc && !fc_opts.config_file.empty()) apply_config_file(*fc, fc_opts.config_file);
    if (*fit) return cmd_fit(fit_opts, out, err);
    if (*fc) return cmd_forecast(fc_opts, fixtures, fc_output, out);
    if (*ev) return cmd_evaluate(ev_opts, out);
    if (*cmp) return cmd_compare(reports, cmp_output, out);
    if (*sim) return cmd_simulate(sim_opts, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const ArtifactMismatch& e) {
    err << "artifact mismatch: " << e.what() << "\n";
    return kConfigError;
  } catch (const SamplerError& e) {
    err << "sampler failure: " << e.what() << " (chains:";
    for (int c : e.chains()) err << " " << c + 1;
    err << ")\n";
    return kSamplerError;
  } catch (const UnknownTeam& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const PeriodOutOfRange& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const UnmatchedFixture& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const SchemaMismatch& e) {
    err << "data error: " << e.what() << "\n";
    return kDataError;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kConfigError;
}

}  // namespace footcast::cli
