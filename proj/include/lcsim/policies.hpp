// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lcsim/extrapolation.hpp"

namespace lcsim::policy {

enum class PolicyKind { IEpoch, Sha, Lce };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_kind_from_string(std::string_view s);

/// One early-discarding policy with its aggressiveness parameter:
/// epoch limit i for IEpoch, reduction factor r for Sha, confidence rho
/// for Lce.
struct PolicySpec {
    PolicyKind kind = PolicyKind::IEpoch;
    double parameter = 1.0;

    void validate(int i_max) const;  // throws ConfigError
    std::string display() const;     // e.g. "iepoch-3", "sha-2", "lce-0.9"
};

enum class Action { Continue, Stop };

enum class Reason { RungRank, HorizonProbability, EpochLimit, InsufficientData };

std::string_view to_string(Reason reason);

struct Decision {
    Action action = Action::Continue;
    Reason reason = Reason::EpochLimit;
};

/// Observations accumulated across candidates within one run: per-epoch
/// validation errors of past candidates and the best final error among
/// candidates trained to completion.
struct SharedHistory {
    std::map<int, std::vector<double>> rung_scores;
    std::optional<double> best_final_error;

    void note_completion(double final_valid_error) {
        if (!best_final_error || final_valid_error < *best_final_error) {
            best_final_error = final_valid_error;
        }
    }
};

/// CONTINUE iff current_epoch < i_limit; ignores all observations.
Decision iepoch_decide(int current_epoch, int i_limit);

/// Geometric rung schedule: deduplicated round(i_min * r^k) values <= i_max,
/// strictly increasing. Throws ConfigError on invalid parameters.
std::vector<int> sha_rungs(int i_min, int i_max, double r);

/// Successive-halving decision at a rung. With m = 1 + past scores at this
/// rung and q = max(1, floor(m / r)), CONTINUE iff the current error ranks
/// <= q (rank 1 = best; ties resolve in the current candidate's favor).
/// The current score is recorded at the rung regardless of the decision.
Decision sha_decide(int current_epoch, double current_valid_error, SharedHistory& history,
                    double r);

/// Extrapolation-based decision. CONTINUES with reason insufficient-data on
/// prefixes shorter than 4 or when no candidate has completed yet;
/// otherwise STOPs iff the posterior probability of being worse than the
/// incumbent at the horizon is >= rho. Extrapolator failures never discard:
/// they continue and bump *engine_failures. When a cache is given, draws
/// are memoized per (candidate, epoch).
Decision lce_decide(std::span<const double> valid_prefix, const SharedHistory& history,
                    double rho, int horizon, const lce::HorizonExtrapolator& extrapolator,
                    std::uint64_t draw_seed, std::string_view candidate_id,
                    lce::ExtrapolationCache* cache, int* engine_failures);

/// Per-run policy instance driven by the simulator, one decision per
/// trained epoch.
class EarlyDiscardPolicy {
public:
    virtual ~EarlyDiscardPolicy() = default;

    virtual Decision decide(std::string_view candidate_id, int epoch,
                            std::span<const double> valid_prefix, SharedHistory& history) = 0;

    virtual int engine_failures() const { return 0; }
};

/// Engine knobs shared by every LCE policy instance of a run or sweep.
struct EngineSettings {
    lce::FitConfig fit{};
    lce::McmcConfig mcmc{};
    std::uint64_t engine_seed = 0;
    bool cache_enabled = true;
    int check_cadence = 1;  // extrapolate every k-th epoch once enough data exists
};

/// Builds the policy named by `spec`. `extrapolator` overrides the default
/// LM+MCMC backend (used by tests and alternative backends); `cache` is
/// shared across runs when non-null.
std::unique_ptr<EarlyDiscardPolicy> make_policy(
    const PolicySpec& spec, int i_max, const EngineSettings& engine,
    std::shared_ptr<lce::ExtrapolationCache> cache = nullptr,
    std::shared_ptr<const lce::HorizonExtrapolator> extrapolator = nullptr);

} // namespace lcsim::policy
