#include "footcast/cli/archive.hpp"

#include "footcast/cli/run_config.hpp"
#include "footcast/data.hpp"

#include <charconv>
#include <fcntl.h>
#include <fstream>
#include <sys/file.h>
#include <sstream>
#include <unistd.h>

namespace footcast::cli {

std::string format_double(double value) {
  char buf[32];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc()) throw std::runtime_error("number formatting failed");
  return std::string(buf, end);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path.string() + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    if (!out.flush()) throw std::runtime_error("write to '" + tmp + "' failed");
  }
  std::filesystem::rename(tmp, path);
}

std::string file_checksum(const std::filesystem::path& path) { return hex64(fnv1a(read_file(path))); }

std::string draws_csv(const ParameterSpace& space, const PosteriorDraws& draws, const std::vector<std::string>& teams) {
  std::string out = "chain,iteration";
  for (const auto& name : space.constrained_names(teams)) {
    out += ',';
    out += name;
  }
  out += '\n';
  for (int c = 0; c < draws.n_chains(); ++c) {
    const auto& chain = draws.chains[static_cast<std::size_t>(c)];
    for (Eigen::Index s = 0; s < chain.draws.rows(); ++s) {
      const Eigen::VectorXd flat = space.flatten(space.constrain(chain.draws.row(s).transpose()));
      out += std::to_string(c + 1);
      out += ',';
      out += std::to_string(s + 1);
      for (Eigen::Index j = 0; j < flat.size(); ++j) {
        out += ',';
        out += format_double(flat(j));
      }
      out += '\n';
    }
  }
  return out;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field += c;
    }
  }
  out.push_back(std::move(field));
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw BadRow(line, "not a number: '" + s + "'");
  return v;
}

}  // namespace

DrawArchive parse_draws_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty draw archive");
  auto header = split(line);
  if (header.size() < 3 || header[0] != "chain" || header[1] != "iteration") {
    throw DataError("draw archive header must start with chain,iteration");
  }
  DrawArchive out;
  out.names.assign(header.begin() + 2, header.end());
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line);
    if (fields.size() != header.size()) throw BadRow(line_no, "wrong number of fields");
    out.chain.push_back(static_cast<int>(to_double(fields[0], line_no)));
    out.iteration.push_back(static_cast<int>(to_double(fields[1], line_no)));
    std::vector<double> row;
    for (std::size_t j = 2; j < fields.size(); ++j) row.push_back(to_double(fields[j], line_no));
    rows.push_back(std::move(row));
  }
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.names.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return out;
}

DirectoryLock::DirectoryLock(const std::filesystem::path& directory) : path_(directory / ".lock") {
  std::filesystem::create_directories(directory);
  fd_ = ::open(path_.c_str(), O_CREAT | O_RDWR | O_CLOEXEC, 0644);
  if (fd_ < 0) throw ConfigError("cannot create lock file " + path_.string());
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    throw ConfigError("output directory '" + directory.string() + "' is locked by another run (" + path_.string() +
                      ")");
  }
}

DirectoryLock::~DirectoryLock() { ::close(fd_); }

}  // namespace footcast::cli
