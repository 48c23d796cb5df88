// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lcsim/lce_fit.hpp"
#include "lcsim/mmf4.hpp"

namespace lcsim::lce {

struct McmcConfig {
    int steps = 3000;     // total sweeps over the five components
    int burn_in = 1000;   // sweeps discarded; proposal scales adapt here
    int thin = 10;        // keep every thin-th post-burn-in sweep
    double target_acceptance = 0.25;
    int adapt_window = 50;
};

struct PosteriorDraw {
    Mmf4Params params{};
    double noise_scale = 0.0;
};

struct PosteriorSamples {
    std::vector<PosteriorDraw> draws;
    double acceptance_rate = 0.0;  // post-burn-in proposal acceptance
    std::uint64_t seed = 0;
};

/// Component-wise Gaussian random-walk Metropolis over (a, b, c, d, noise).
/// Log-posterior: Gaussian likelihood of the residuals with scale `noise`,
/// plus independent unit-variance Gaussian priors on a, b, c, d centered at
/// the fitted parameters (raw coordinates), plus an Exponential(scale 1)
/// prior on the noise scale. Proposal scales adapt toward the target
/// acceptance during burn-in and stay frozen afterwards. Deterministic
/// given the seed. Throws ValidationError when the log-posterior is
/// non-finite at initialization (a corrupt fit).
PosteriorSamples sample_posterior(std::span<const Anchor> prefix, const FitResult& lm_fit,
                                  const McmcConfig& config, std::uint64_t seed);

/// Noise-free model extrapolation of every draw at the given epoch.
std::vector<double> horizon_extrapolations(const PosteriorSamples& samples, double horizon);

/// Fraction of draws whose extrapolated value at `horizon` is strictly
/// worse (greater, error orientation) than the incumbent.
double prob_worse_at_horizon(const PosteriorSamples& samples, double incumbent_final_error,
                             int horizon);

} // namespace lcsim::lce
