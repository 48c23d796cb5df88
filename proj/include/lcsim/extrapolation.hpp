// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "lcsim/lce_fit.hpp"
#include "lcsim/lce_mcmc.hpp"
#include "lcsim/mmf4.hpp"

namespace lcsim::lce {

/// Produces draws of a curve's value at a future epoch from an observed
/// prefix. This is the integration point for alternative extrapolation
/// backends (e.g. pretrained surrogates); the in-tree implementation is
/// the LM-fit + MCMC pipeline.
class HorizonExtrapolator {
public:
    virtual ~HorizonExtrapolator() = default;

    virtual std::vector<double> horizon_draws(std::span<const Anchor> prefix, int horizon,
                                              std::uint64_t seed) const = 0;
};

/// LM fit, data-driven prior, MCMC posterior, extrapolated at the horizon.
class McmcExtrapolator final : public HorizonExtrapolator {
public:
    McmcExtrapolator(FitConfig fit, McmcConfig mcmc) : fit_(fit), mcmc_(mcmc) {}

    std::vector<double> horizon_draws(std::span<const Anchor> prefix, int horizon,
                                      std::uint64_t seed) const override {
        FitResult fit = fit_lm(prefix, fit_);
        if (!fit.converged) fit = heuristic_fit(prefix);  // prior center fallback
        const PosteriorSamples samples = sample_posterior(prefix, fit, mcmc_, seed);
        return horizon_extrapolations(samples, static_cast<double>(horizon));
    }

private:
    FitConfig fit_;
    McmcConfig mcmc_;
};

/// Thread-safe memo of horizon draws keyed by (candidate, epoch). Cached
/// values must not depend on run state: callers derive the draw seed from
/// the key, so a cache may be shared across runs, sweeps, and threads
/// without changing any result.
class ExtrapolationCache {
public:
    using Entry = std::shared_ptr<const std::vector<double>>;

    Entry find(std::string_view candidate_id, int epoch) const {
        const std::string key = make_key(candidate_id, epoch);
        std::lock_guard lock(mutex_);
        const auto it = map_.find(key);
        return it == map_.end() ? nullptr : it->second;
    }

    Entry insert(std::string_view candidate_id, int epoch, std::vector<double> draws) {
        const std::string key = make_key(candidate_id, epoch);
        auto entry = std::make_shared<const std::vector<double>>(std::move(draws));
        std::lock_guard lock(mutex_);
        const auto [it, inserted] = map_.try_emplace(key, entry);
        return it->second;  // first writer wins; values are identical by construction
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return map_.size();
    }

private:
    static std::string make_key(std::string_view candidate_id, int epoch) {
        return std::string(candidate_id) + "@" + std::to_string(epoch);
    }

    mutable std::mutex mutex_;
    std::unordered_map<std::string, Entry> map_;
};

} // namespace lcsim::lce
