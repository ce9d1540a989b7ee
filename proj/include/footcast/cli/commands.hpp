#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace footcast::cli {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kSamplerError = 4 };

class ArtifactMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UnmatchedFixture : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SchemaMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parses `args` (without the program name), runs the verb and maps failures onto exit
/// codes: 2 configuration, 3 data, 4 sampler.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace footcast::cli
