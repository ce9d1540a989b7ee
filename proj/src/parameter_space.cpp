#include "footcast/parameter_space.hpp"

#include <numbers>

namespace footcast {

std::string_view to_string(Dynamics dynamics) {
  switch (dynamics) {
    case Dynamics::fixed: return "static";
    case Dynamics::owen: return "owen";
    case Dynamics::egidi: return "egidi";
    case Dynamics::weighted: return "weighted";
  }
  return "?";
}

Dynamics parse_dynamics(std::string_view text) {
  for (Dynamics d : {Dynamics::fixed, Dynamics::owen, Dynamics::egidi, Dynamics::weighted}) {
    if (text == to_string(d)) return d;
  }
  throw std::invalid_argument("unknown dynamics '" + std::string(text) + "'");
}

void HyperParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be positive");
  };
  positive(sd_spike, "sd_spike");
  positive(sd_slab, "sd_slab");
  positive(cauchy_scale, "cauchy_scale");
  positive(home_prior_sd, "home_prior_sd");
  positive(init_ability_sd, "init_ability_sd");
  positive(intercept_prior_sd, "intercept_prior_sd");
  if (!(sd_spike < sd_slab)) throw std::invalid_argument("sd_spike must be smaller than sd_slab");
  if (!(p_slab >= 0 && p_slab <= 1)) throw std::invalid_argument("p_slab must lie in [0, 1]");
  if (!std::isfinite(mu_spike) || !std::isfinite(mu_slab)) {
    throw std::invalid_argument("spike and slab means must be finite");
  }
}

void HyperParams::set(std::string_view key, double value) {
  if (key == "mu_spike") mu_spike = value;
  else if (key == "sd_spike") sd_spike = value;
  else if (key == "mu_slab") mu_slab = value;
  else if (key == "sd_slab") sd_slab = value;
  else if (key == "p_slab") p_slab = value;
  else if (key == "cauchy_scale") cauchy_scale = value;
  else if (key == "home_prior_sd") home_prior_sd = value;
  else if (key == "init_ability_sd") init_ability_sd = value;
  else if (key == "intercept_prior_sd") intercept_prior_sd = value;
  else throw std::invalid_argument("unknown hyperparameter '" + std::string(key) + "'");
}

void ModelSpec::validate() const {
  if (n_teams < 2) throw std::invalid_argument("a model needs at least two teams");
  if (n_periods < 1) throw std::invalid_argument("a model needs at least one period");
  if (dynamics == Dynamics::weighted && n_periods < 2) {
    throw std::invalid_argument("weighted dynamics need at least two periods");
  }
  hyper.validate();
}

FamilyParams ParameterView::family_params(Family family) const {
  return {family, gamma, omega, xi, eta0};
}

ScoringRates<double> ParameterView::rates(Family family, int home_team, int away_team, int period0) const {
  const auto [l1, l2] = log_scoring_rates(beta0, home, att(home_team, period0), def(away_team, period0),
                                          att(away_team, period0), def(home_team, period0));
  return {std::exp(l1), std::exp(l2), has_eta0(family) ? std::exp(eta0) : 0.0};
}

ParameterSpace::ParameterSpace(ModelSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const Family f = spec_.family;
  Eigen::Index next = 2;
  if (has_eta0(f)) eta0_ = next++;
  if (has_gamma(f)) gamma_ = next++;
  if (has_omega(f)) omega_ = next++;
  if (has_xi(f)) xi_ = next++;
  const Eigen::Index block = static_cast<Eigen::Index>(spec_.n_teams - 1) * spec_.n_periods;
  att_ = next;
  def_ = att_ + block;
  next = def_ + block;
  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: sigma_ = next++; break;
    case Dynamics::egidi: sigma_ = next; next += 2; break;
    case Dynamics::weighted: phi_att_ = next; next += 2 * (spec_.n_periods - 1); break;
  }
  dim_ = next;
  constrained_dim_ = dim_ + 2 * spec_.n_periods;  // every team's ability, not just the free ones
}

ParameterSpace build_space(const ModelSpec& spec) { return ParameterSpace(spec); }

Eigen::Index ParameterSpace::att_index(int team, int period0) const noexcept {
  return att_ + static_cast<Eigen::Index>(period0) * (spec_.n_teams - 1) + team;
}

Eigen::Index ParameterSpace::def_index(int team, int period0) const noexcept {
  return def_ + static_cast<Eigen::Index>(period0) * (spec_.n_teams - 1) + team;
}

namespace {

// The full step of all n teams, (s, -sum s), has squared norm s'(I + 11')s. These map
// between free steps s and innovations z with |z|^2 = s'(I + 11')s.
Eigen::VectorXd innovation_to_step(const Eigen::VectorXd& z, int n) {
  const double a = (1.0 / std::sqrt(static_cast<double>(n)) - 1.0) / (n - 1);
  return z.array() + a * z.sum();
}

Eigen::VectorXd step_to_innovation(const Eigen::VectorXd& s, int n) {
  const double b = (std::sqrt(static_cast<double>(n)) - 1.0) / (n - 1);
  return s.array() + b * s.sum();
}

void require_finite(const Eigen::Ref<const Eigen::VectorXd>& v, const char* what) {
  if (!v.allFinite()) throw NonFinite(std::string(what) + " contains NaN or infinite values");
}

}  // namespace

ParameterView ParameterSpace::constrain(const Eigen::Ref<const Eigen::VectorXd>& theta) const {
  if (theta.size() != dim_) throw std::invalid_argument("theta has the wrong dimension");
  require_finite(theta, "unconstrained vector");

  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  ParameterView v;
  v.beta0 = theta(0);
  v.home = theta(1);
  if (eta0_ >= 0) v.eta0 = theta(eta0_);
  if (gamma_ >= 0) v.gamma = std::exp(theta(gamma_));
  if (omega_ >= 0) v.omega = logistic(theta(omega_));
  if (xi_ >= 0) v.xi = std::exp(theta(xi_));

  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: v.sigma = std::exp(theta(sigma_)); break;
    case Dynamics::egidi:
      v.sigma_att = std::exp(theta(sigma_));
      v.sigma_def = std::exp(theta(sigma_ + 1));
      break;
    case Dynamics::weighted:
      v.phi_att = theta.segment(phi_att_, t - 1).array().exp();
      v.phi_def = theta.segment(phi_att_ + t - 1, t - 1).array().exp();
      break;
  }

  const bool nc = non_centred();
  const double scale_att = nc ? 1.0 / std::sqrt(spec_.dynamics == Dynamics::owen ? v.sigma : v.sigma_att) : 0;
  const double scale_def = nc ? 1.0 / std::sqrt(spec_.dynamics == Dynamics::owen ? v.sigma : v.sigma_def) : 0;
  v.att.resize(n, t);
  v.def.resize(n, t);
  for (int p = 0; p < t; ++p) {
    Eigen::VectorXd a = theta.segment(att_index(0, p), n - 1);
    Eigen::VectorXd d = theta.segment(def_index(0, p), n - 1);
    if (nc && p > 0) {
      a = v.att.col(p - 1).head(n - 1) + scale_att * innovation_to_step(a, n);
      d = v.def.col(p - 1).head(n - 1) + scale_def * innovation_to_step(d, n);
    }
    v.att.col(p).head(n - 1) = a;
    v.att(n - 1, p) = -a.sum();
    v.def.col(p).head(n - 1) = d;
    v.def(n - 1, p) = -d.sum();
  }
  return v;
}

Eigen::VectorXd ParameterSpace::unconstrain(const ParameterView& v) const {
  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  if (v.att.rows() != n || v.att.cols() != t || v.def.rows() != n || v.def.cols() != t) {
    throw std::invalid_argument("ability matrices do not match the parameter space");
  }
  if (!v.att.allFinite() || !v.def.allFinite()) throw NonFinite("abilities contain NaN or infinite values");
  const double tol = 1e-8 * (1.0 + v.att.cwiseAbs().maxCoeff() + v.def.cwiseAbs().maxCoeff()) * n;
  if ((v.att.colwise().sum().cwiseAbs().array() > tol).any() ||
      (v.def.colwise().sum().cwiseAbs().array() > tol).any()) {
    throw std::invalid_argument("abilities violate the per-period zero-sum constraint");
  }

  Eigen::VectorXd theta(dim_);
  theta(0) = v.beta0;
  theta(1) = v.home;
  if (eta0_ >= 0) theta(eta0_) = v.eta0;
  if (gamma_ >= 0) theta(gamma_) = std::log(v.gamma);
  if (omega_ >= 0) theta(omega_) = logit(v.omega);
  if (xi_ >= 0) theta(xi_) = std::log(v.xi);
  const bool nc = non_centred();
  for (int p = 0; p < t; ++p) {
    if (nc && p > 0) {
      const double ra = std::sqrt(spec_.dynamics == Dynamics::owen ? v.sigma : v.sigma_att);
      const double rd = std::sqrt(spec_.dynamics == Dynamics::owen ? v.sigma : v.sigma_def);
      theta.segment(att_index(0, p), n - 1) =
          ra * step_to_innovation(v.att.col(p).head(n - 1) - v.att.col(p - 1).head(n - 1), n);
      theta.segment(def_index(0, p), n - 1) =
          rd * step_to_innovation(v.def.col(p).head(n - 1) - v.def.col(p - 1).head(n - 1), n);
    } else {
      theta.segment(att_index(0, p), n - 1) = v.att.col(p).head(n - 1);
      theta.segment(def_index(0, p), n - 1) = v.def.col(p).head(n - 1);
    }
  }
  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: theta(sigma_) = std::log(v.sigma); break;
    case Dynamics::egidi:
      theta(sigma_) = std::log(v.sigma_att);
      theta(sigma_ + 1) = std::log(v.sigma_def);
      break;
    case Dynamics::weighted:
      if (v.phi_att.size() != t - 1 || v.phi_def.size() != t - 1) {
        throw std::invalid_argument("phi vectors must have n_periods - 1 entries");
      }
      theta.segment(phi_att_, t - 1) = v.phi_att.array().log();
      theta.segment(phi_att_ + t - 1, t - 1) = v.phi_def.array().log();
      break;
  }
  if (!theta.allFinite()) throw NonFinite("view maps to a non-finite unconstrained vector");
  return theta;
}

Eigen::VectorXd ParameterSpace::flatten(const ParameterView& v) const {
  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  Eigen::VectorXd out(constrained_dim_);
  Eigen::Index k = 0;
  out(k++) = v.beta0;
  out(k++) = v.home;
  if (eta0_ >= 0) out(k++) = v.eta0;
  if (gamma_ >= 0) out(k++) = v.gamma;
  if (omega_ >= 0) out(k++) = v.omega;
  if (xi_ >= 0) out(k++) = v.xi;
  for (int p = 0; p < t; ++p)
    for (int i = 0; i < n; ++i) out(k++) = v.att(i, p);
  for (int p = 0; p < t; ++p)
    for (int i = 0; i < n; ++i) out(k++) = v.def(i, p);
  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: out(k++) = v.sigma; break;
    case Dynamics::egidi:
      out(k++) = v.sigma_att;
      out(k++) = v.sigma_def;
      break;
    case Dynamics::weighted:
      out.segment(k, t - 1) = v.phi_att;
      k += t - 1;
      out.segment(k, t - 1) = v.phi_def;
      k += t - 1;
      break;
  }
  return out;
}

ParameterView ParameterSpace::unflatten(const Eigen::Ref<const Eigen::VectorXd>& values) const {
  if (values.size() != constrained_dim_) throw std::invalid_argument("constrained vector has the wrong size");
  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  ParameterView v;
  Eigen::Index k = 0;
  v.beta0 = values(k++);
  v.home = values(k++);
  if (eta0_ >= 0) v.eta0 = values(k++);
  if (gamma_ >= 0) v.gamma = values(k++);
  if (omega_ >= 0) v.omega = values(k++);
  if (xi_ >= 0) v.xi = values(k++);
  v.att.resize(n, t);
  v.def.resize(n, t);
  for (int p = 0; p < t; ++p)
    for (int i = 0; i < n; ++i) v.att(i, p) = values(k++);
  for (int p = 0; p < t; ++p)
    for (int i = 0; i < n; ++i) v.def(i, p) = values(k++);
  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: v.sigma = values(k++); break;
    case Dynamics::egidi:
      v.sigma_att = values(k++);
      v.sigma_def = values(k++);
      break;
    case Dynamics::weighted:
      v.phi_att = values.segment(k, t - 1);
      k += t - 1;
      v.phi_def = values.segment(k, t - 1);
      break;
  }
  return v;
}

std::vector<std::string> ParameterSpace::constrained_names(const std::vector<std::string>& teams) const {
  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  auto team = [&](int i) { return i < static_cast<int>(teams.size()) ? teams[i] : std::to_string(i + 1); };
  std::vector<std::string> names{"beta0", "home"};
  if (eta0_ >= 0) names.emplace_back("eta0");
  if (gamma_ >= 0) names.emplace_back("gamma");
  if (omega_ >= 0) names.emplace_back("omega");
  if (xi_ >= 0) names.emplace_back("xi");
  for (const char* kind : {"att", "def"})
    for (int p = 0; p < t; ++p)
      for (int i = 0; i < n; ++i)
        names.push_back(std::string(kind) + "[" + team(i) + "][" + std::to_string(p + 1) + "]");
  switch (spec_.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen: names.emplace_back("sigma"); break;
    case Dynamics::egidi:
      names.emplace_back("sigma_att");
      names.emplace_back("sigma_def");
      break;
    case Dynamics::weighted:
      for (const char* kind : {"phi_att", "phi_def"})
        for (int p = 2; p <= t; ++p) names.push_back(std::string(kind) + "[" + std::to_string(p) + "]");
      break;
  }
  return names;
}

double log_spike_slab(double phi, const HyperParams& h) {
  auto component = [phi](double weight, double mu, double sd) {
    if (weight <= 0) return neg_inf<double>;
    return std::log(weight) + log_normal_density(phi, mu, sd) - log_normal_cdf(mu / sd);
  };
  return log_sum_exp(component(1.0 - h.p_slab, h.mu_spike, h.sd_spike),
                     component(h.p_slab, h.mu_slab, h.sd_slab));
}

double d_log_spike_slab(double phi, const HyperParams& h) {
  const double total = log_spike_slab(phi, h);
  double d = 0;
  auto add = [&](double weight, double mu, double sd) {
    if (weight <= 0) return;
    const double lc = std::log(weight) + log_normal_density(phi, mu, sd) - log_normal_cdf(mu / sd);
    d += std::exp(lc - total) * (-(phi - mu) / (sd * sd));
  };
  add(1.0 - h.p_slab, h.mu_spike, h.sd_spike);
  add(h.p_slab, h.mu_slab, h.sd_slab);
  return d;
}

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

// Accumulates the random-walk term for one ability type stepping from period p-1 to p.
// Returns d/d(precision) of the term; ability partials go into `g` (n x t).
double random_walk_step(const Eigen::MatrixXd& ability, int p, double precision, double& lp,
                        Eigen::MatrixXd* g) {
  const Eigen::VectorXd step = ability.col(p) - ability.col(p - 1);
  const double n = static_cast<double>(step.size());
  const double ss = step.squaredNorm();
  // the n steps sum to zero, so the walk is normalised over n - 1 dimensions
  lp += 0.5 * (n - 1) * std::log(precision) - n * kHalfLogTwoPi - 0.5 * precision * ss;
  if (g) {
    g->col(p) -= precision * step;
    g->col(p - 1) += precision * step;
  }
  return 0.5 * (n - 1) / precision - 0.5 * ss;
}

}  // namespace

void ParameterSpace::add_ability_gradient(const ParameterView& v, const Eigen::MatrixXd& ga,
                                          const Eigen::MatrixXd& gd, Eigen::VectorXd& grad) const {
  const int n = spec_.n_teams;
  const int t = spec_.n_periods;
  auto one = [&](const Eigen::MatrixXd& ability, const Eigen::MatrixXd& g, Eigen::Index first,
                 Eigen::Index precision_index, double precision) {
    const Eigen::MatrixXd free = g.topRows(n - 1).rowwise() - g.row(n - 1);
    const auto block = [&](int p) { return grad.segment(first + static_cast<Eigen::Index>(p) * (n - 1), n - 1); };
    if (!non_centred()) {
      for (int p = 0; p < t; ++p) block(p) += free.col(p);
      return;
    }
    // a_p = a_{p-1} + A z_p / sqrt(precision) with A symmetric
    Eigen::VectorXd suffix = Eigen::VectorXd::Zero(n - 1);
    const double scale = 1.0 / std::sqrt(precision);
    for (int p = t - 1; p >= 1; --p) {
      suffix += free.col(p);
      block(p) += scale * innovation_to_step(suffix, n);
      grad(precision_index) -= 0.5 * suffix.dot(ability.col(p).head(n - 1) - ability.col(p - 1).head(n - 1));
    }
    block(0) += suffix + free.col(0);
  };
  const bool owen = spec_.dynamics == Dynamics::owen;
  one(v.att, ga, att_, sigma_, owen ? v.sigma : v.sigma_att);
  one(v.def, gd, def_, owen ? sigma_ : sigma_ + 1, owen ? v.sigma : v.sigma_def);
}

PriorTerms log_prior_terms(const ParameterSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta,
                           Eigen::VectorXd* grad) {
  const ModelSpec& spec = space.spec();
  const HyperParams& h = spec.hyper;
  const ParameterView v = space.constrain(theta);
  const int n = spec.n_teams;
  const int t = spec.n_periods;
  PriorTerms out;

  Eigen::MatrixXd ga, gd;
  if (grad) {
    ga = Eigen::MatrixXd::Zero(n, t);
    gd = Eigen::MatrixXd::Zero(n, t);
  }
  auto add_grad = [grad](Eigen::Index i, double value) {
    if (grad) (*grad)(i) += value;
  };

  // fixed effects
  out.fixed_effects += log_normal_density(v.beta0, 0.0, h.intercept_prior_sd) +
                       log_normal_density(v.home, 0.0, h.home_prior_sd);
  add_grad(0, -v.beta0 / (h.intercept_prior_sd * h.intercept_prior_sd));
  add_grad(1, -v.home / (h.home_prior_sd * h.home_prior_sd));
  if (space.eta0_index() >= 0) {
    out.fixed_effects += log_normal_density(v.eta0, 0.0, h.intercept_prior_sd);
    add_grad(space.eta0_index(), -v.eta0 / (h.intercept_prior_sd * h.intercept_prior_sd));
  }

  // independent priors on the free coordinates: period 1 always, every period when static
  const int independent_periods = spec.dynamics == Dynamics::fixed ? t : 1;
  const double init_var = h.init_ability_sd * h.init_ability_sd;
  for (int p = 0; p < independent_periods; ++p) {
    for (int i = 0; i < n - 1; ++i) {
      out.initial_abilities += log_normal_density(v.att(i, p), 0.0, h.init_ability_sd) +
                               log_normal_density(v.def(i, p), 0.0, h.init_ability_sd);
      add_grad(space.att_index(i, p), -v.att(i, p) / init_var);
      add_grad(space.def_index(i, p), -v.def(i, p) / init_var);
    }
  }

  Eigen::MatrixXd* pga = grad ? &ga : nullptr;
  Eigen::MatrixXd* pgd = grad ? &gd : nullptr;

  // precision p = exp(u): d/du = p * d/dp, plus 1 from the log-Jacobian
  auto log_precision = [&](Eigen::Index index, double precision, double d_precision, double hyper_lp,
                           double d_hyper) {
    out.precision_hyper += hyper_lp;
    out.jacobian += std::log(precision);
    add_grad(index, precision * (d_precision + d_hyper) + 1.0);
  };

  switch (spec.dynamics) {
    case Dynamics::fixed: break;
    case Dynamics::owen:
    case Dynamics::egidi: {
      // Non-centred coordinates: the random-walk density plus the Jacobian of
      // z -> step is a standard normal in z, free of the precision.
      const bool owen = spec.dynamics == Dynamics::owen;
      const double pa = owen ? v.sigma : v.sigma_att;
      const double pd = owen ? v.sigma : v.sigma_def;
      for (int p = 1; p < t; ++p) {
        random_walk_step(v.att, p, pa, out.dynamics, nullptr);
        random_walk_step(v.def, p, pd, out.dynamics, nullptr);
        out.jacobian -= 0.5 * (n - 1) * (std::log(pa) + std::log(pd)) + std::log(static_cast<double>(n));
        for (int i = 0; i < n - 1; ++i) {
          add_grad(space.att_index(i, p), -theta(space.att_index(i, p)));
          add_grad(space.def_index(i, p), -theta(space.def_index(i, p)));
        }
      }
      if (owen) {
        log_precision(space.sigma_index(), pa, 0, log_half_cauchy(pa, h.cauchy_scale),
                      d_log_half_cauchy(pa, h.cauchy_scale));
      } else {
        log_precision(space.sigma_att_index(), pa, 0, log_half_cauchy(pa, h.cauchy_scale),
                      d_log_half_cauchy(pa, h.cauchy_scale));
        log_precision(space.sigma_def_index(), pd, 0, log_half_cauchy(pd, h.cauchy_scale),
                      d_log_half_cauchy(pd, h.cauchy_scale));
      }
      break;
    }
    case Dynamics::weighted: {
      for (int p = 1; p < t; ++p) {
        const double pa = v.phi_att(p - 1);
        const double pd = v.phi_def(p - 1);
        const double da = random_walk_step(v.att, p, pa, out.dynamics, pga);
        const double dd = random_walk_step(v.def, p, pd, out.dynamics, pgd);
        log_precision(space.phi_att_index(p), pa, da, log_spike_slab(pa, h), d_log_spike_slab(pa, h));
        log_precision(space.phi_def_index(p), pd, dd, log_spike_slab(pd, h), d_log_spike_slab(pd, h));
        out.n_spike_slab_terms += 2;
      }
      break;
    }
  }

  // family extras: half-Cauchy on gamma and xi (log scale), uniform omega (logit scale)
  if (space.gamma_index() >= 0) {
    out.family_extras += log_half_cauchy(v.gamma, kExtrasCauchyScale);
    out.jacobian += std::log(v.gamma);
    add_grad(space.gamma_index(), v.gamma * d_log_half_cauchy(v.gamma, kExtrasCauchyScale) + 1.0);
  }
  if (space.xi_index() >= 0) {
    out.family_extras += log_half_cauchy(v.xi, kExtrasCauchyScale);
    out.jacobian += std::log(v.xi);
    add_grad(space.xi_index(), v.xi * d_log_half_cauchy(v.xi, kExtrasCauchyScale) + 1.0);
  }
  if (space.omega_index() >= 0) {
    const double u = theta(space.omega_index());
    // log(omega (1 - omega)) = -softplus(-u) - softplus(u)
    out.jacobian += -(std::max(u, 0.0) + std::log1p(std::exp(-std::abs(u)))) -
                    (std::max(-u, 0.0) + std::log1p(std::exp(-std::abs(u))));
    add_grad(space.omega_index(), 1.0 - 2.0 * v.omega);
  }

  if (grad) space.add_ability_gradient(v, ga, gd, *grad);
  return out;
}

double log_prior(const ParameterSpace& space, const Eigen::Ref<const Eigen::VectorXd>& theta,
                 Eigen::VectorXd* grad) {
  return log_prior_terms(space, theta, grad).total();
}

void check_matches(const ParameterSpace& space, std::span<const IndexedMatch> matches) {
  const int n = space.spec().n_teams;
  const int t = space.spec().n_periods;
  for (const auto& m : matches) {
    if (m.home < 0 || m.home >= n || m.away < 0 || m.away >= n || m.home == m.away) {
      throw std::invalid_argument("match references a team outside the parameter space");
    }
    if (m.period < 0 || m.period >= t) throw std::invalid_argument("match period outside the parameter space");
    if (m.home_goals < 0 || m.away_goals < 0) throw std::invalid_argument("negative goal count");
  }
}

double log_likelihood(const ParameterSpace& space, std::span<const IndexedMatch> matches,
                      const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad) {
  const ModelSpec& spec = space.spec();
  const ParameterView v = space.constrain(theta);
  const FamilyParams fp = v.family_params(spec.family);
  const int n = spec.n_teams;

  double lp = 0;
  if (!grad) {
    for (const auto& m : matches) lp += log_pmf(m.home_goals, m.away_goals, v.rates(spec.family, m.home, m.away, m.period), fp);
    return lp;
  }

  Eigen::MatrixXd ga = Eigen::MatrixXd::Zero(n, spec.n_periods);
  Eigen::MatrixXd gd = Eigen::MatrixXd::Zero(n, spec.n_periods);
  double g_beta0 = 0, g_home = 0, g_eta0 = 0, g_omega = 0, g_xi = 0, g_gamma = 0;
  for (const auto& m : matches) {
    const auto g = log_pmf_with_gradient(m.home_goals, m.away_goals, v.rates(spec.family, m.home, m.away, m.period), fp);
    lp += g.value;
    g_beta0 += g.d_log_lambda1 + g.d_log_lambda2;
    g_home += g.d_log_lambda1;
    ga(m.home, m.period) += g.d_log_lambda1;
    gd(m.away, m.period) += g.d_log_lambda1;
    ga(m.away, m.period) += g.d_log_lambda2;
    gd(m.home, m.period) += g.d_log_lambda2;
    g_eta0 += g.d_eta0;
    g_omega += g.d_logit_omega;
    g_xi += g.d_log_xi;
    g_gamma += g.d_log_gamma;
  }

  (*grad)(0) += g_beta0;
  (*grad)(1) += g_home;
  if (space.eta0_index() >= 0) (*grad)(space.eta0_index()) += g_eta0;
  if (space.omega_index() >= 0) (*grad)(space.omega_index()) += g_omega;
  if (space.xi_index() >= 0) (*grad)(space.xi_index()) += g_xi;
  if (space.gamma_index() >= 0) (*grad)(space.gamma_index()) += g_gamma;
  space.add_ability_gradient(v, ga, gd, *grad);
  return lp;
}

double log_posterior(const ParameterSpace& space, std::span<const IndexedMatch> matches,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad) {
  if (grad) grad->setZero(space.dim());
  return log_prior(space, theta, grad) + log_likelihood(space, matches, theta, grad);
}

double log_posterior(const ParameterSpace& space, const PeriodizedDataset& data,
                     const Eigen::Ref<const Eigen::VectorXd>& theta, Eigen::VectorXd* grad) {
  const auto matches = data.indexed();
  check_matches(space, matches);
  return log_posterior(space, matches, theta, grad);
}

}  // namespace footcast
