#pragma once

#include "footcast/sampler.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace footcast {

/// Split R-hat: the largest of the rank-normalised bulk, rank-normalised folded, and
/// untransformed split statistics. Ranks saturate for fully separated chains, so the
/// untransformed value keeps large offsets visible.
/// `draws` is iterations x chains. Constant input returns 1.
double split_rhat(const Eigen::Ref<const Eigen::MatrixXd>& draws);

struct EssResult {
  double value = 0;
  bool degenerate = false;  // constant input; value is then the draw count
};

/// Bulk ESS on rank-normalised split chains, Geyer initial monotone truncation.
EssResult ess_bulk(const Eigen::Ref<const Eigen::MatrixXd>& draws);

/// Tail ESS: the smaller ESS of the 5% and 95% quantile indicators.
EssResult ess_tail(const Eigen::Ref<const Eigen::MatrixXd>& draws);

/// ESS of the raw (untransformed) draws, split chains.
EssResult ess_basic(const Eigen::Ref<const Eigen::MatrixXd>& draws);

/// Normal scores of average ranks: Phi^-1((r - 3/8) / (S + 1/4)) over all entries.
Eigen::MatrixXd rank_normalize(const Eigen::Ref<const Eigen::MatrixXd>& draws);

struct ParameterDiagnostics {
  std::string name;
  double rhat = 1;
  double ess_bulk = 0;
  double ess_tail = 0;
};

struct Diagnostics {
  std::vector<ParameterDiagnostics> parameters;
  int divergences = 0;

  double max_rhat() const;
  double min_ess_bulk() const;
  double min_ess_tail() const;
};

/// Diagnostics for every column of per-chain matrices (iterations x parameters).
Diagnostics compute_diagnostics(const std::vector<Eigen::MatrixXd>& chains, const std::vector<std::string>& names,
                                int divergences = 0);

}  // namespace footcast
