#include "footcast/cli/run_config.hpp"

#include "footcast/cli/archive.hpp"

#include <cstdio>
#include <filesystem>
#include <sstream>

namespace footcast::cli {

DataSource DataSource::parse(const std::string& text) {
  if (text.empty()) throw ConfigError("empty --data value");
  DataSource out;
  const auto colon = text.rfind(':');
  // a colon followed by a path separator is part of the path (e.g. C:\...)
  if (colon != std::string::npos && colon + 1 < text.size() && text.find('/', colon) == std::string::npos &&
      text.find('\\', colon) == std::string::npos) {
    out.path = text.substr(0, colon);
    out.season = text.substr(colon + 1);
  } else {
    out.path = text;
    out.season = std::filesystem::path(text).stem().string();
  }
  if (out.path.empty()) throw ConfigError("--data needs a file path");
  return out;
}

HyperParams RunConfig::hyper_params() const {
  HyperParams h;
  for (const auto& [key, value] : hyper) {
    try {
      h.set(key, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  return h;
}

void RunConfig::validate() const {
  if (data.empty()) throw ConfigError("at least one --data file is required");
  try {
    sampler.validate();
    hyper_params().validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (out.empty()) throw ConfigError("--out must not be empty");
}

std::string RunConfig::canonical() const {
  std::ostringstream s;
  for (const auto& d : data) s << "data=" << d.to_string() << "\n";
  s << "league=" << league << "\n";
  s << "family=" << to_string(family) << "\n";
  s << "dynamics=" << to_string(dynamics) << "\n";
  s << "scenario=" << scenario.to_string() << "\n";
  s << "chains=" << sampler.n_chains << "\n";
  s << "warmup=" << sampler.n_warmup << "\n";
  s << "samples=" << sampler.n_samples << "\n";
  s << "target_accept=" << format_double(sampler.target_accept) << "\n";
  s << "max_depth=" << sampler.max_tree_depth << "\n";
  s << "init_jitter=" << format_double(sampler.init_jitter) << "\n";
  s << "seed=" << sampler.seed << "\n";
  for (const auto& [key, value] : hyper) s << "hyper." << key << "=" << format_double(value) << "\n";
  return s.str();
}

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t hash) {
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string config_hash(const RunConfig& config) {
  std::uint64_t h = fnv1a(config.canonical());
  for (const auto& d : config.data) h = fnv1a(read_file(d.path), h);
  return hex64(h);
}

}  // namespace footcast::cli
