#pragma once

#include "footcast/parameter_space.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace footcast::testing {

inline const std::vector<Family>& all_families() {
  static const std::vector<Family> f{Family::dp, Family::bp, Family::dibp, Family::nb, Family::sm, Family::zism};
  return f;
}

inline const std::vector<Dynamics>& all_dynamics() {
  static const std::vector<Dynamics> d{Dynamics::fixed, Dynamics::owen, Dynamics::egidi, Dynamics::weighted};
  return d;
}

// Every ordered pair plays once per period; goals are arbitrary small counts.
inline std::vector<IndexedMatch> toy_matches(int n_teams, int n_periods, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> goals(0, 4);
  std::vector<IndexedMatch> out;
  for (int p = 0; p < n_periods; ++p) {
    for (int h = 0; h < n_teams; ++h) {
      for (int a = 0; a < n_teams; ++a) {
        if (h != a) out.push_back({h, a, p, goals(rng), goals(rng)});
      }
    }
  }
  return out;
}

// Random unconstrained point; half the weighted-model precisions sit near the spike.
inline Eigen::VectorXd random_theta(const ParameterSpace& space, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 0.5);
  Eigen::VectorXd theta(space.dim());
  for (Eigen::Index i = 0; i < theta.size(); ++i) theta(i) = normal(rng);
  const ModelSpec& spec = space.spec();
  if (spec.dynamics == Dynamics::weighted) {
    std::bernoulli_distribution spike(0.5);
    for (int p = 1; p < spec.n_periods; ++p) {
      for (Eigen::Index i : {space.phi_att_index(p), space.phi_def_index(p)}) {
        if (spike(rng)) theta(i) = std::log(100.0 + 0.1 * normal(rng));
      }
    }
  }
  return theta;
}

// Largest |analytic - central difference| / max(1, |central difference|).
inline double gradient_error(const ParameterSpace& space, std::span<const IndexedMatch> matches,
                             const Eigen::VectorXd& theta, double h = 1e-6) {
  Eigen::VectorXd grad(space.dim());
  log_posterior(space, matches, theta, &grad);
  double worst = 0;
  Eigen::VectorXd up = theta, down = theta;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    up(i) += h;
    down(i) -= h;
    const double fd = (log_posterior(space, matches, up) - log_posterior(space, matches, down)) / (2 * h);
    up(i) = down(i) = theta(i);
    worst = std::max(worst, std::abs(grad(i) - fd) / std::max(1.0, std::abs(fd)));
  }
  return worst;
}

// Midpoint rule on (0, upper) split into `pieces` equal cells.
template <typename F>
double integrate(F&& f, double lower, double upper, int pieces) {
  const double width = (upper - lower) / pieces;
  double total = 0;
  for (int i = 0; i < pieces; ++i) total += f(lower + (i + 0.5) * width);
  return total * width;
}

// Gauss-Legendre 10-point rule on [a, b], composite over `pieces` cells.
template <typename F>
double gauss_legendre(F&& f, double a, double b, int pieces) {
  static constexpr double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                  0.9739065285171717};
  static constexpr double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                  0.0666713443086881};
  const double width = (b - a) / pieces;
  double total = 0;
  for (int k = 0; k < pieces; ++k) {
    const double mid = a + (k + 0.5) * width;
    const double half = 0.5 * width;
    for (int j = 0; j < 5; ++j) total += w[j] * (f(mid - half * x[j]) + f(mid + half * x[j])) * half;
  }
  return total;
}

}  // namespace footcast::testing
