// SPDX-License-Identifier: Apache-2.0
#include "lcsim/lce_mcmc.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "lcsim/errors.hpp"
#include "lcsim/rng.hpp"

namespace lcsim::lce {

namespace {

constexpr int kComponents = 5;  // a, b, c, d, noise

struct State {
    std::array<double, kComponents> v{};  // raw coordinates

    double a() const { return v[0]; }
    double b() const { return v[1]; }
    double c() const { return v[2]; }
    double d() const { return v[3]; }
    double noise() const { return v[4]; }
};

struct LogPosterior {
    std::span<const Anchor> prefix;
    std::array<double, 4> prior_center{};

    // x^d per anchor for the current d; recomputed only on d proposals.
    double operator()(const State& s, std::span<const double> powers) const {
        if (s.b() <= 0.0 || s.noise() <= 0.0) return -std::numeric_limits<double>::infinity();
        const double n = static_cast<double>(prefix.size());
        double ss = 0.0;
        for (std::size_t j = 0; j < prefix.size(); ++j) {
            const double t = powers[j];
            const double w = std::isfinite(t) ? s.b() / (s.b() + t) : 0.0;
            const double f = s.c() + (s.a() - s.c()) * w;
            const double r = f - prefix[j].error;
            ss += r * r;
        }
        double lp = -0.5 * ss / (s.noise() * s.noise()) - n * std::log(s.noise()) -
                    0.5 * n * std::log(2.0 * std::numbers::pi);
        for (int k = 0; k < 4; ++k) {
            const double d = s.v[static_cast<std::size_t>(k)] - prior_center[static_cast<std::size_t>(k)];
            lp += -0.5 * d * d;
        }
        lp += -s.noise();  // Exponential(scale 1) on the noise scale
        return lp;
    }
};

void fill_powers(std::span<const Anchor> prefix, double d, std::vector<double>& out) {
    out.resize(prefix.size());
    for (std::size_t j = 0; j < prefix.size(); ++j) out[j] = std::pow(prefix[j].epoch, d);
}

} // namespace

PosteriorSamples sample_posterior(std::span<const Anchor> prefix, const FitResult& lm_fit,
                                  const McmcConfig& config, std::uint64_t seed) {
    if (prefix.size() < 4) {
        throw std::invalid_argument("sample_posterior: need at least 4 anchors");
    }
    if (config.steps <= config.burn_in || config.thin < 1 || config.burn_in < 0) {
        throw ConfigError("sample_posterior: steps must exceed burn_in and thin must be >= 1");
    }
    const int n_draws = (config.steps - config.burn_in) / config.thin;
    if (n_draws < 100) {
        throw ConfigError("sample_posterior: configuration yields " + std::to_string(n_draws) +
                          " draws; at least 100 required");
    }

    const Mmf4Params& center = lm_fit.params;
    if (!(center.b > 0.0) || !std::isfinite(center.a) || !std::isfinite(center.b) ||
        !std::isfinite(center.c) || !std::isfinite(center.d) || !std::isfinite(lm_fit.sse)) {
        throw ValidationError("sample_posterior: non-finite or invalid fit parameters");
    }

    LogPosterior logpost{prefix, {center.a, center.b, center.c, center.d}};

    State state;
    state.v = {center.a, center.b, center.c, center.d,
               std::max(std::sqrt(lm_fit.sse / static_cast<double>(prefix.size())), 1e-4)};

    std::vector<double> powers;
    fill_powers(prefix, state.d(), powers);
    double lp = logpost(state, powers);
    if (!std::isfinite(lp)) {
        throw ValidationError("sample_posterior: non-finite log-posterior at initialization");
    }

    Rng rng(seed);
    std::array<double, kComponents> scales = {0.1, 0.1, 0.1, 0.1,
                                              std::max(0.1 * state.noise(), 1e-3)};
    std::array<int, kComponents> window_accepted{};
    std::array<int, kComponents> window_proposed{};
    std::int64_t post_accepted = 0;
    std::int64_t post_proposed = 0;

    PosteriorSamples out;
    out.seed = seed;
    out.draws.reserve(static_cast<std::size_t>(n_draws));

    std::vector<double> proposed_powers;
    for (int sweep = 1; sweep <= config.steps; ++sweep) {
        const bool adapting = sweep <= config.burn_in;
        for (int k = 0; k < kComponents; ++k) {
            State trial = state;
            trial.v[static_cast<std::size_t>(k)] += scales[static_cast<std::size_t>(k)] * rng.normal01();

            std::span<const double> trial_powers(powers);
            if (k == 3) {
                fill_powers(prefix, trial.d(), proposed_powers);
                trial_powers = proposed_powers;
            }
            const double trial_lp = logpost(trial, trial_powers);

            double u = rng.uniform01();
            while (u <= 0.0) u = rng.uniform01();
            const bool accept = std::isfinite(trial_lp) && std::log(u) < trial_lp - lp;
            if (accept) {
                state = trial;
                lp = trial_lp;
                if (k == 3) std::swap(powers, proposed_powers);
            }

            if (adapting) {
                ++window_proposed[static_cast<std::size_t>(k)];
                if (accept) ++window_accepted[static_cast<std::size_t>(k)];
                if (window_proposed[static_cast<std::size_t>(k)] >= config.adapt_window) {
                    const double rate = static_cast<double>(window_accepted[static_cast<std::size_t>(k)]) /
                                        static_cast<double>(window_proposed[static_cast<std::size_t>(k)]);
                    scales[static_cast<std::size_t>(k)] *= std::exp(rate - config.target_acceptance);
                    scales[static_cast<std::size_t>(k)] =
                        std::clamp(scales[static_cast<std::size_t>(k)], 1e-8, 1e3);
                    window_proposed[static_cast<std::size_t>(k)] = 0;
                    window_accepted[static_cast<std::size_t>(k)] = 0;
                }
            } else {
                ++post_proposed;
                if (accept) ++post_accepted;
            }
        }
        if (sweep > config.burn_in && (sweep - config.burn_in) % config.thin == 0) {
            out.draws.push_back({{state.a(), state.b(), state.c(), state.d()}, state.noise()});
        }
    }

    out.acceptance_rate = post_proposed > 0
                              ? static_cast<double>(post_accepted) / static_cast<double>(post_proposed)
                              : 0.0;
    return out;
}

std::vector<double> horizon_extrapolations(const PosteriorSamples& samples, double horizon) {
    std::vector<double> out;
    out.reserve(samples.draws.size());
    for (const PosteriorDraw& d : samples.draws) out.push_back(mmf4_eval(d.params, horizon));
    return out;
}

double prob_worse_at_horizon(const PosteriorSamples& samples, double incumbent_final_error,
                             int horizon) {
    if (samples.draws.empty()) {
        throw std::invalid_argument("prob_worse_at_horizon: empty draw set");
    }
    std::size_t worse = 0;
    for (const PosteriorDraw& d : samples.draws) {
        if (mmf4_eval(d.params, static_cast<double>(horizon)) > incumbent_final_error) ++worse;
    }
    return static_cast<double>(worse) / static_cast<double>(samples.draws.size());
}

} // namespace lcsim::lce
