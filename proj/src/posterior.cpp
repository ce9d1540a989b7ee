#include "footcast/posterior.hpp"

#include "footcast/numeric.hpp"

#include <array>
#include <cmath>
#include <memory>
#include <numbers>

namespace footcast {

double log_phi_conditional(double phi, double ss, int n_teams, const HyperParams& hyper) {
  if (!(phi > 0)) return neg_inf<double>;
  return 0.5 * (n_teams - 1) * std::log(phi) - 0.5 * phi * ss + log_spike_slab(phi, hyper);
}

namespace {

constexpr int kPhiSteps = 3;
constexpr double kProposalInflation = 1.5;
constexpr double kLogScaleStep = 0.5;

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

// Normal(mean, sd) truncated to (0, inf).
struct PositiveNormal {
  double weight;
  double mean;
  double sd;

  double log_density(double x) const {
    return log_normal_density(x, mean, sd) - log_normal_cdf(mean / sd);
  }
  double draw(Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double lo = normal_cdf(-mean / sd);
    for (;;) {
      const double u = lo + (1.0 - lo) * unif(rng);
      if (u <= 0 || u >= 1) continue;
      const double x = mean + sd * normal_quantile(u);
      if (x > 0 && std::isfinite(x)) return x;
    }
  }
};

std::array<PositiveNormal, 2> laplace_proposal(double ss, int n_teams, const HyperParams& h) {
  const double a = 0.5 * (n_teams - 1);
  const double b = 0.5 * ss;
  std::array<double, 2> log_mass{};
  std::array<PositiveNormal, 2> comps{};
  const std::array<std::array<double, 3>, 2> parts{{{1.0 - h.p_slab, h.mu_spike, h.sd_spike},
                                                    {h.p_slab, h.mu_slab, h.sd_slab}}};
  for (int k = 0; k < 2; ++k) {
    const auto [w, mu, psi] = parts[k];
    const double c = mu - b * psi * psi;
    const double mode = 0.5 * (c + std::sqrt(c * c + 4.0 * a * psi * psi));
    const double sd = 1.0 / std::sqrt(1.0 / (psi * psi) + a / (mode * mode));
    comps[k] = {0, mode, kProposalInflation * sd};
    log_mass[k] = w > 0 ? std::log(w) + a * std::log(mode) - b * mode + log_normal_density(mode, mu, psi) -
                              log_normal_cdf(mu / psi) + std::log(sd)
                        : neg_inf<double>;
  }
  const double total = log_sum_exp(log_mass[0], log_mass[1]);
  for (int k = 0; k < 2; ++k) comps[k].weight = std::exp(log_mass[k] - total);
  return comps;
}

double log_proposal(const std::array<PositiveNormal, 2>& q, double x) {
  double out = neg_inf<double>;
  for (const auto& c : q) {
    if (c.weight > 0) out = log_sum_exp(out, std::log(c.weight) + c.log_density(x));
  }
  return out;
}

}  // namespace

double update_phi(double phi, double ss, int n_teams, const HyperParams& hyper, Rng& rng) {
  const auto q = laplace_proposal(ss, n_teams, hyper);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double current = log_phi_conditional(phi, ss, n_teams, hyper) - log_proposal(q, phi);
  for (int step = 0; step < kPhiSteps; ++step) {
    const auto& comp = unif(rng) < q[0].weight ? q[0] : q[1];
    const double proposal = comp.draw(rng);
    const double next = log_phi_conditional(proposal, ss, n_teams, hyper) - log_proposal(q, proposal);
    if (!std::isfinite(current) || std::log(unif(rng)) < next - current) {
      phi = proposal;
      current = next;
    }
  }
  // random-walk moves on log phi cover regions the Laplace proposal is too light on
  std::normal_distribution<double> normal(0.0, 1.0);
  double log_target = log_phi_conditional(phi, ss, n_teams, hyper) + std::log(phi);
  for (int step = 0; step < kPhiSteps; ++step) {
    const double proposal = phi * std::exp(kLogScaleStep * normal(rng));
    const double next = log_phi_conditional(proposal, ss, n_teams, hyper) + std::log(proposal);
    if (std::log(unif(rng)) < next - log_target) {
      phi = proposal;
      log_target = next;
    }
  }
  return phi;
}

Target make_posterior_target(const ParameterSpace& space, std::span<const IndexedMatch> matches) {
  check_matches(space, matches);
  auto shared_space = std::make_shared<const ParameterSpace>(space);
  auto shared_matches = std::make_shared<const std::vector<IndexedMatch>>(matches.begin(), matches.end());

  Target target;
  target.dim = space.dim();
  target.log_density = [shared_space, shared_matches](const Eigen::VectorXd& theta, Eigen::VectorXd& grad) {
    grad.resize(theta.size());
    try {
      const double lp = log_posterior(*shared_space, *shared_matches, theta, &grad);
      if (std::isnan(lp)) throw NonFinite("nan");
      return lp;
    } catch (const std::domain_error&) {
      grad.setZero();
      return neg_inf<double>;
    }
  };

  const ModelSpec& spec = space.spec();
  if (spec.dynamics != Dynamics::weighted) return target;

  for (int p = 1; p < spec.n_periods; ++p) {
    target.conditional_coords.push_back(space.phi_att_index(p));
    target.conditional_coords.push_back(space.phi_def_index(p));
  }
  target.conditional_update = [shared_space](Eigen::VectorXd& theta, Rng& rng) {
    const ParameterSpace& s = *shared_space;
    const ModelSpec& m = s.spec();
    ParameterView v;
    try {
      v = s.constrain(theta);
    } catch (const std::domain_error&) {
      return;
    }
    for (int p = 1; p < m.n_periods; ++p) {
      const double ss_att = (v.att.col(p) - v.att.col(p - 1)).squaredNorm();
      const double ss_def = (v.def.col(p) - v.def.col(p - 1)).squaredNorm();
      theta(s.phi_att_index(p)) = std::log(update_phi(v.phi_att(p - 1), ss_att, m.n_teams, m.hyper, rng));
      theta(s.phi_def_index(p)) = std::log(update_phi(v.phi_def(p - 1), ss_def, m.n_teams, m.hyper, rng));
    }
  };
  return target;
}

}  // namespace footcast
