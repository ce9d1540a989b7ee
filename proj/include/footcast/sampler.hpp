#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace footcast {

using Rng = std::mt19937_64;

class SamplerError : public std::runtime_error {
 public:
  SamplerError(const std::string& what, std::vector<int> chains)
      : std::runtime_error(what), chains_(std::move(chains)) {}
  const std::vector<int>& chains() const noexcept { return chains_; }

 private:
  std::vector<int> chains_;
};

class AllChainsDiverged : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

class NonFiniteInit : public SamplerError {
 public:
  using SamplerError::SamplerError;
};

/// A differentiable log density on R^dim.
///
/// Coordinates listed in `conditional_coords` are held fixed by the Hamiltonian moves
/// and are refreshed once per iteration by `conditional_update`, which must leave the
/// target invariant given the other coordinates.
struct Target {
  Eigen::Index dim = 0;
  std::function<double(const Eigen::VectorXd& theta, Eigen::VectorXd& grad)> log_density;
  std::vector<Eigen::Index> conditional_coords;
  std::function<void(Eigen::VectorXd& theta, Rng& rng)> conditional_update;
};

struct SamplerConfig {
  int n_chains = 4;
  int n_warmup = 1000;
  int n_samples = 1000;
  double target_accept = 0.8;
  int max_tree_depth = 10;
  std::uint64_t seed = 20250516;
  double init_jitter = 2.0;
  double max_energy_error = 1000.0;
  int n_threads = 0;  // 0 = one per chain, capped by hardware concurrency

  void validate() const;  // throws std::invalid_argument
};

struct ProgressEvent {
  int chain = 0;
  int iteration = 0;  // 0-based, warmup included
  int total = 0;
  bool warmup = true;
};

using ProgressCallback = std::function<void(const ProgressEvent&)>;

struct ChainDraws {
  Eigen::MatrixXd draws;           // n_samples x dim, unconstrained
  Eigen::VectorXd accept_stat;     // per sampling iteration
  Eigen::VectorXi tree_depth;
  Eigen::VectorXi n_leapfrog;
  Eigen::VectorXi divergent;
  double step_size = 0;
  Eigen::VectorXd inv_metric;
  int divergences = 0;
  int warmup_divergences = 0;
};

struct PosteriorDraws {
  std::vector<ChainDraws> chains;

  int n_chains() const noexcept { return static_cast<int>(chains.size()); }
  int n_samples() const noexcept { return chains.empty() ? 0 : static_cast<int>(chains.front().draws.rows()); }
  Eigen::Index dim() const noexcept { return chains.empty() ? 0 : chains.front().draws.cols(); }
  int total_divergences() const;
  /// n_samples x n_chains matrix for one unconstrained coordinate.
  Eigen::MatrixXd coordinate(Eigen::Index index) const;
  /// Every draw stacked chain after chain: (n_chains * n_samples) x dim.
  Eigen::MatrixXd stacked() const;
};

/// Runs `config.n_chains` independent NUTS chains (multinomial trajectory sampling with
/// the generalised no-U-turn criterion). Warmup adapts the step size by dual averaging
/// and a diagonal metric over doubling windows (15% initial buffer, 75% metric windows,
/// 10% final step-size buffer). Chain c draws from its own seed-derived generator, so
/// results do not depend on thread scheduling.
PosteriorDraws sample(const Target& target, const SamplerConfig& config, const ProgressCallback& progress = {});

/// Generator for chain `chain` of a run seeded with `seed`.
Rng chain_rng(std::uint64_t seed, int chain);

/// One leapfrog step with a diagonal inverse metric. Exposed for integrator tests.
struct PhasePoint {
  Eigen::VectorXd q;
  Eigen::VectorXd p;
  Eigen::VectorXd grad;
  double log_density = 0;
};
void leapfrog(const Target& target, const Eigen::VectorXd& inv_metric, double step, PhasePoint& z);
double hamiltonian(const Eigen::VectorXd& inv_metric, const PhasePoint& z);

}  // namespace footcast
