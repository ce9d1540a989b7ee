#pragma once

#include "footcast/data.hpp"
#include "footcast/likelihoods.hpp"

#include <Eigen/Core>

#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace footcast {

class NonFinite : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Ability dynamics across periods. `fixed` is the static model: every period's
/// abilities get an independent prior and no random walk links them.
enum class Dynamics { fixed, owen, egidi, weighted };

std::string_view to_string(Dynamics dynamics);
Dynamics parse_dynamics(std::string_view text);

struct HyperParams {
  double mu_spike = 100.0;
  double sd_spike = 0.1;
  double mu_slab = 0.0;
  double sd_slab = 5.0;
  double p_slab = 0.99;
  double cauchy_scale = 5.0;
  double home_prior_sd = 5.0;
  double init_ability_sd = 2.0;
  double intercept_prior_sd = 5.0;

  void validate() const;  // throws std::invalid_argument
  void set(std::string_view key, double value);
};

/// Half-Cauchy scale for the negative binomial dispersion and the diagonal-inflation
/// rate.
inline constexpr double kExtrasCauchyScale = 5.0;

struct ModelSpec {
  Family family = Family::dp;
  Dynamics dynamics = Dynamics::fixed;
  int n_teams = 2;
  int n_periods = 1;
  HyperParams hyper;

  void validate() const;  // throws std::invalid_argument
};

/// Named, constrained model parameters. Abilities are n_teams x n_periods and sum to
/// zero down every column. Precisions (sigma*, phi*) are inverse variances of the
/// period-to-period ability step.
struct ParameterView {
  double beta0 = 0;
  double home = 0;
  double eta0 = 0;
  double gamma = 1;
  double omega = 0.5;
  double xi = 1;
  Eigen::MatrixXd att;
  Eigen::MatrixXd def;
  double sigma = 1;
  double sigma_att = 1;
  double sigma_def = 1;
  Eigen::VectorXd phi_att;  // entry t is the precision into period t + 2
  Eigen::VectorXd phi_def;

  FamilyParams family_params(Family family) const;
  /// lambda3 is exp(eta0) for families with a covariance term and 0 otherwise.
  ScoringRates<double> rates(Family family, int home_team, int away_team, int period0) const;
};

/// Bijection between the sampler's unconstrained vector and a ParameterView.
///
/// Layout: beta0, home, [eta0], [log gamma], [logit omega], [log xi], attack block,
/// defence block, then the dynamics precisions on the log scale. Each ability block
/// holds n_teams - 1 free coordinates per period (period-major); the last team is the
/// negative sum of the others. Under owen and egidi dynamics the coordinates of periods
/// after the first are standardised innovations (non-centred); otherwise they are the
/// abilities themselves.
class ParameterSpace {
 public:
  explicit ParameterSpace(ModelSpec spec);

  const ModelSpec& spec() const noexcept { return spec_; }
  Eigen::Index dim() const noexcept { return dim_; }

  ParameterView constrain(const Eigen::Ref<const Eigen::VectorXd>& theta) const;
  Eigen::VectorXd unconstrain(const ParameterView& view) const;

  /// Flat constrained representation in `constrained_names()` order.
  Eigen::VectorXd flatten(const ParameterView& view) const;
  ParameterView unflatten(const Eigen::Ref<const Eigen::VectorXd>& values) const;
  Eigen::Index constrained_dim() const noexcept { return constrained_dim_; }
  bool non_centred() const noexcept {
    return spec_.dynamics == Dynamics::owen || spec_.dynamics == Dynamics::egidi;
  }
  /// Adds into `grad` the theta-gradient implied by gradients `ga`, `gd` with respect to
  /// the full n_teams x n_periods ability matrices of `view = constrain(theta)`.
  void add_ability_gradient(const ParameterView& view, const Eigen::MatrixXd& ga, const Eigen::MatrixXd& gd,
                            Eigen::VectorXd& grad) const;
  std::vector<std::string> constrained_names(const std::vector<std::string>& teams = {}) const;

  Eigen::Index beta0_index() const noexcept { return 0; }
  Eigen::Index home_index() const noexcept { return 1; }
  Eigen::Index eta0_index() const noexcept { return eta0_; }
  Eigen::Index gamma_index() const noexcept { return gamma_; }
  Eigen::Index omega_index() const noexcept { return omega_; }
  Eigen::Index xi_index() const noexcept { return xi_; }
  Eigen::Index att_index(int team, int period0) const noexcept;
  Eigen::Index def_index(int team, int period0) const noexcept;
  Eigen::Index sigma_index() const noexcept { return sigma_; }
  Eigen::Index sigma_att_index() const noexcept { return sigma_; }
  Eigen::Index sigma_def_index() const noexcept { return sigma_ + 1; }
  /// Index of phi for the step into period `period0` (1-based step, period0 >= 1).
  Eigen::Index phi_att_index(int period0) const noexcept { return phi_att_ + period0 - 1; }
  Eigen::Index phi_def_index(int period0) const noexcept {
    return phi_att_ + (spec_.n_periods - 1) + period0 - 1;
  }

 private:
  ModelSpec spec_;
  Eigen::Index dim_ = 0;
  Eigen::Index constrained_dim_ = 0;
  Eigen::Index eta0_ = -1, gamma_ = -1, omega_ = -1, xi_ = -1;
  Eigen::Index att_ = -1, def_ = -1, sigma_ = -1, phi_att_ = -1;
};

ParameterSpace build_space(const ModelSpec& spec);

/// Continuous spike-and-slab density for a commensurability precision: a two-component
/// mixture of normals truncated below at zero, weighted 1 - p_slab (spike) and p_slab.
double log_spike_slab(double phi, const HyperParams& hyper);
double d_log_spike_slab(double phi, const HyperParams& hyper);

/// Components of the log prior on the unconstrained scale.
struct PriorTerms {
  double fixed_effects = 0;     // beta0, home, eta0
  double initial_abilities = 0;
  double dynamics = 0;          // random-walk terms only
  double precision_hyper = 0;   // half-Cauchy or spike-slab on the precisions
  double family_extras = 0;     // gamma, omega, xi
  double jacobian = 0;
  int n_spike_slab_terms = 0;

  double total() const {
    return fixed_effects + initial_abilities + dynamics + precision_hyper + family_extras + jacobian;
  }
};

/// Log prior including the change-of-variables Jacobian. When `grad` is non-null the
/// gradient with respect to theta is added into it (it must have size dim()).
PriorTerms log_prior_terms(const ParameterSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           Eigen::VectorXd* grad = nullptr);

double log_prior(const ParameterSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta,
                 Eigen::VectorXd* grad = nullptr);

/// Log likelihood of the matches; the gradient (if requested) is added into `grad`.
double log_likelihood(const ParameterSpace& space, std::span<const IndexedMatch> matches,
                      const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad = nullptr);

/// Unnormalized log posterior on the unconstrained scale. `grad`, when given, is
/// overwritten with the exact gradient.
double log_posterior(const ParameterSpace& space, std::span<const IndexedMatch> matches,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad = nullptr);

double log_posterior(const ParameterSpace& space, const PeriodizedDataset& data,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad = nullptr);

/// Throws std::invalid_argument if any match references a team or period outside the space.
void check_matches(const ParameterSpace& space, std::span<const IndexedMatch> matches);

}  // namespace footcast
