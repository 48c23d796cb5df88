// SPDX-License-Identifier: Apache-2.0
#include "lcsim/policies.hpp"

#include <algorithm>
#include <cmath>

#include "lcsim/errors.hpp"
#include "lcsim/util.hpp"

namespace lcsim::policy {

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
        case PolicyKind::IEpoch: return "iepoch";
        case PolicyKind::Sha: return "sha";
        case PolicyKind::Lce: return "lce";
    }
    return "?";
}

PolicyKind policy_kind_from_string(std::string_view s) {
    if (s == "iepoch") return PolicyKind::IEpoch;
    if (s == "sha") return PolicyKind::Sha;
    if (s == "lce") return PolicyKind::Lce;
    throw ConfigError("unknown policy kind: '" + std::string(s) + "'");
}

std::string_view to_string(Reason reason) {
    switch (reason) {
        case Reason::RungRank: return "rung-rank";
        case Reason::HorizonProbability: return "horizon-probability";
        case Reason::EpochLimit: return "epoch-limit";
        case Reason::InsufficientData: return "insufficient-data";
    }
    return "?";
}

void PolicySpec::validate(int i_max) const {
    switch (kind) {
        case PolicyKind::IEpoch: {
            double int_part = 0.0;
            if (std::modf(parameter, &int_part) != 0.0 || parameter < 1.0 ||
                parameter > static_cast<double>(i_max)) {
                throw ConfigError("iepoch parameter must be an integer in [1, " +
                                  std::to_string(i_max) + "], got " + fmt_param(parameter));
            }
            return;
        }
        case PolicyKind::Sha:
            if (!(parameter > 1.0) || !std::isfinite(parameter)) {
                throw ConfigError("sha reduction factor must be > 1, got " + fmt_param(parameter));
            }
            return;
        case PolicyKind::Lce:
            if (!(parameter > 0.0) || !(parameter < 1.0)) {
                throw ConfigError("lce confidence must lie in (0, 1), got " + fmt_param(parameter));
            }
            return;
    }
}

std::string PolicySpec::display() const {
    return std::string(to_string(kind)) + "-" + fmt_param(parameter);
}

Decision iepoch_decide(int current_epoch, int i_limit) {
    return {current_epoch < i_limit ? Action::Continue : Action::Stop, Reason::EpochLimit};
}

std::vector<int> sha_rungs(int i_min, int i_max, double r) {
    if (!(r > 1.0) || !std::isfinite(r) || i_min < 1 || i_max < i_min) {
        throw ConfigError("sha_rungs: require r > 1 and 1 <= i_min <= i_max");
    }
    std::vector<int> rungs;
    double value = static_cast<double>(i_min);
    while (true) {
        const int rung = static_cast<int>(std::llround(value));
        if (rung > i_max) break;
        if (rungs.empty() || rung > rungs.back()) rungs.push_back(rung);
        value *= r;
    }
    return rungs;
}

Decision sha_decide(int current_epoch, double current_valid_error, SharedHistory& history,
                    double r) {
    std::vector<double>& past = history.rung_scores[current_epoch];
    const int m = static_cast<int>(past.size()) + 1;
    const int q = std::max(1, static_cast<int>(std::floor(static_cast<double>(m) / r)));
    int rank = 1;
    for (const double score : past) {
        if (score < current_valid_error) ++rank;  // ties favor the current candidate
    }
    past.push_back(current_valid_error);
    return {rank <= q ? Action::Continue : Action::Stop, Reason::RungRank};
}

Decision lce_decide(std::span<const double> valid_prefix, const SharedHistory& history,
                    double rho, int horizon, const lce::HorizonExtrapolator& extrapolator,
                    std::uint64_t draw_seed, std::string_view candidate_id,
                    lce::ExtrapolationCache* cache, int* engine_failures) {
    if (valid_prefix.size() < 4 || !history.best_final_error) {
        return {Action::Continue, Reason::InsufficientData};
    }
    const int epoch = static_cast<int>(valid_prefix.size());
    try {
        lce::ExtrapolationCache::Entry entry;
        if (cache) entry = cache->find(candidate_id, epoch);
        if (!entry) {
            std::vector<lce::Anchor> anchors;
            anchors.reserve(valid_prefix.size());
            for (std::size_t e = 0; e < valid_prefix.size(); ++e) {
                anchors.push_back({static_cast<double>(e + 1), valid_prefix[e]});
            }
            std::vector<double> draws = extrapolator.horizon_draws(anchors, horizon, draw_seed);
            if (cache) {
                entry = cache->insert(candidate_id, epoch, std::move(draws));
            } else {
                entry = std::make_shared<const std::vector<double>>(std::move(draws));
            }
        }
        if (entry->empty()) throw ValidationError("extrapolator returned no draws");
        std::size_t worse = 0;
        for (const double v : *entry) {
            if (v > *history.best_final_error) ++worse;
        }
        const double p = static_cast<double>(worse) / static_cast<double>(entry->size());
        return {p >= rho ? Action::Stop : Action::Continue, Reason::HorizonProbability};
    } catch (const std::exception&) {
        // A failed extrapolation must never discard a candidate.
        if (engine_failures) ++*engine_failures;
        return {Action::Continue, Reason::InsufficientData};
    }
}

namespace {

class IEpochPolicy final : public EarlyDiscardPolicy {
public:
    explicit IEpochPolicy(int i_limit) : i_limit_(i_limit) {}

    Decision decide(std::string_view, int epoch, std::span<const double>,
                    SharedHistory&) override {
        return iepoch_decide(epoch, i_limit_);
    }

private:
    int i_limit_;
};

class ShaPolicy final : public EarlyDiscardPolicy {
public:
    ShaPolicy(double r, int i_max) : r_(r), rungs_(sha_rungs(1, i_max, r)) {}

    Decision decide(std::string_view, int epoch, std::span<const double> valid_prefix,
                    SharedHistory& history) override {
        if (!std::binary_search(rungs_.begin(), rungs_.end(), epoch)) {
            return {Action::Continue, Reason::RungRank};
        }
        return sha_decide(epoch, valid_prefix.back(), history, r_);
    }

private:
    double r_;
    std::vector<int> rungs_;
};

class LcePolicy final : public EarlyDiscardPolicy {
public:
    LcePolicy(double rho, int i_max, const EngineSettings& engine,
              std::shared_ptr<lce::ExtrapolationCache> cache,
              std::shared_ptr<const lce::HorizonExtrapolator> extrapolator)
        : rho_(rho),
          i_max_(i_max),
          cadence_(std::max(1, engine.check_cadence)),
          engine_seed_(engine.engine_seed),
          cache_(std::move(cache)),
          extrapolator_(std::move(extrapolator)) {}

    Decision decide(std::string_view candidate_id, int epoch,
                    std::span<const double> valid_prefix, SharedHistory& history) override {
        history.rung_scores[epoch].push_back(valid_prefix.back());  // bookkeeping
        if (epoch >= i_max_ || epoch % cadence_ != 0) {
            return {Action::Continue, Reason::InsufficientData};
        }
        // The draw seed depends only on (engine seed, candidate, epoch) so
        // cached entries are identical no matter which run computes them.
        std::uint64_t seed = fnv1a64(candidate_id);
        seed = fnv1a64("@" + std::to_string(epoch), seed);
        seed = fnv1a64(hex64(engine_seed_), seed);
        return lce_decide(valid_prefix, history, rho_, i_max_, *extrapolator_, seed,
                          candidate_id, cache_.get(), &failures_);
    }

    int engine_failures() const override { return failures_; }

private:
    double rho_;
    int i_max_;
    int cadence_;
    std::uint64_t engine_seed_;
    std::shared_ptr<lce::ExtrapolationCache> cache_;
    std::shared_ptr<const lce::HorizonExtrapolator> extrapolator_;
    int failures_ = 0;
};

} // namespace

std::unique_ptr<EarlyDiscardPolicy> make_policy(
    const PolicySpec& spec, int i_max, const EngineSettings& engine,
    std::shared_ptr<lce::ExtrapolationCache> cache,
    std::shared_ptr<const lce::HorizonExtrapolator> extrapolator) {
    spec.validate(i_max);
    switch (spec.kind) {
        case PolicyKind::IEpoch:
            return std::make_unique<IEpochPolicy>(static_cast<int>(spec.parameter));
        case PolicyKind::Sha:
            return std::make_unique<ShaPolicy>(spec.parameter, i_max);
        case PolicyKind::Lce: {
            if (!extrapolator) {
                extrapolator = std::make_shared<lce::McmcExtrapolator>(engine.fit, engine.mcmc);
            }
            if (!cache && engine.cache_enabled) {
                cache = std::make_shared<lce::ExtrapolationCache>();
            }
            return std::make_unique<LcePolicy>(spec.parameter, i_max, engine, std::move(cache),
                                               std::move(extrapolator));
        }
    }
    throw ConfigError("unreachable policy kind");
}

} // namespace lcsim::policy
