#pragma once

#include "footcast/parameter_space.hpp"
#include "footcast/sampler.hpp"

#include <span>
#include <vector>

namespace footcast {

/// Sampler target for the model posterior. Under weighted dynamics the spike-and-slab
/// precisions are refreshed by conditional Metropolis-Hastings steps instead of
/// Hamiltonian moves; every other coordinate is driven by NUTS.
///
/// The returned target copies `space` and `matches`.
Target make_posterior_target(const ParameterSpace& space, std::span<const IndexedMatch> matches);

/// Log of the full conditional of phi (up to a constant) given the squared ability
/// step total `ss` over `n_teams` teams.
double log_phi_conditional(double phi, double ss, int n_teams, const HyperParams& hyper);

/// One independence Metropolis-Hastings update of phi against log_phi_conditional,
/// proposing from a Laplace approximation of each spike-and-slab component.
double update_phi(double phi, double ss, int n_teams, const HyperParams& hyper, Rng& rng);

}  // namespace footcast
