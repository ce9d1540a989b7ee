#pragma once

#include "footcast/data.hpp"
#include "footcast/parameter_space.hpp"
#include "footcast/sampler.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace footcast::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataSource {
  std::string path;
  std::string season;

  /// "path[:season]"; the season defaults to the file name without extension.
  static DataSource parse(const std::string& text);
  std::string to_string() const { return path + ":" + season; }
};

struct RunConfig {
  std::vector<DataSource> data;
  std::string league = "league";
  Family family = Family::bp;
  Dynamics dynamics = Dynamics::weighted;
  Scenario scenario;
  SamplerConfig sampler;
  std::map<std::string, double> hyper;
  std::string out = "run";

  HyperParams hyper_params() const;
  PeriodScheme period_scheme() const {
    return dynamics == Dynamics::fixed ? PeriodScheme::single : PeriodScheme::half_season;
  }
  /// Throws ConfigError on any invalid setting.
  void validate() const;
  /// Canonical key=value text of every setting that influences the fit (not `out`).
  std::string canonical() const;
};

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash = 0xcbf29ce484222325ull);
std::string hex64(std::uint64_t value);

/// Hash of the canonical config plus the bytes of every data file.
std::string config_hash(const RunConfig& config);

}  // namespace footcast::cli
