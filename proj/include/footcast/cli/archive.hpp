#pragma once

#include "footcast/parameter_space.hpp"
#include "footcast/sampler.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <vector>

namespace footcast::cli {

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

std::string read_file(const std::filesystem::path& path);
/// Writes through a temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
std::string file_checksum(const std::filesystem::path& path);

/// Columns chain, iteration, then one column per constrained parameter.
std::string draws_csv(const ParameterSpace& space, const PosteriorDraws& draws, const std::vector<std::string>& teams);

struct DrawArchive {
  std::vector<std::string> names;
  std::vector<int> chain;
  std::vector<int> iteration;
  Eigen::MatrixXd values;  // rows = draws
};

DrawArchive parse_draws_csv(const std::string& text);

/// Exclusive advisory lock on an output directory, held until destruction or process exit.
class DirectoryLock {
 public:
  explicit DirectoryLock(const std::filesystem::path& directory);
  ~DirectoryLock();
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

}  // namespace footcast::cli
