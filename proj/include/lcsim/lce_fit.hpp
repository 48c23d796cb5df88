// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <span>

#include "lcsim/mmf4.hpp"

namespace lcsim::lce {

struct FitConfig {
    int max_iterations = 100;
    int restarts = 8;           // random restarts beyond the heuristic initialization
    double gradient_tol = 1e-10;
    double step_tol = 1e-12;
    std::uint64_t seed = 0x11a5;  // restart jitter stream
};

struct FitResult {
    Mmf4Params params{};
    double sse = std::numeric_limits<double>::infinity();
    bool converged = false;
    int restarts_used = 0;
};

/// Damped least-squares fit of the four curve parameters to an observed
/// prefix. b stays positive by optimizing log b internally. The result is
/// the best of the heuristic initialization (a = first value, c = last
/// value, b = 1, d = 1) and `restarts` jittered initializations; accepted
/// steps never increase the sum of squared residuals. Never throws on
/// numerical failure: a fit where no initialization converged comes back
/// with converged = false and the best parameters seen.
/// Requires at least four anchors (four free parameters).
FitResult fit_lm(std::span<const Anchor> prefix, const FitConfig& config = {});

/// The heuristic initialization as a (non-converged) fit result; the
/// extrapolation pipeline centers its prior here when the optimizer fails,
/// so a decision is always available.
FitResult heuristic_fit(std::span<const Anchor> prefix);

} // namespace lcsim::lce
