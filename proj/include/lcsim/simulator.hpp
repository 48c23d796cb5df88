// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "lcsim/curve_store.hpp"
#include "lcsim/policies.hpp"

namespace lcsim::sim {

struct RunConfig {
    policy::PolicySpec policy{};
    std::uint64_t seed = 0;
    int n_iterations = 200;
    int top_k = 3;
    policy::EngineSettings engine{};
};

struct CandidateRecord {
    std::string candidate_id;
    int stop_epoch = 0;                 // epoch at which training ended
    double observed_valid_error = 0.0;  // validation error at stop_epoch
    int epochs_charged = 0;             // = stop_epoch for the evaluation phase
    policy::Reason stop_reason = policy::Reason::EpochLimit;
};

struct AnytimeEntry {
    int iteration = 0;
    std::int64_t cumulative_epochs = 0;  // evaluation epochs so far + completion surcharge
    double final_valid_error = 0.0;
    double final_test_error = 0.0;
    std::string selected_candidate_id;
};

struct SimulationTrace {
    RunConfig config{};
    std::string benchmark_name;
    int i_max = 0;
    int n_iterations_effective = 0;
    std::vector<CandidateRecord> records;
    std::vector<AnytimeEntry> anytime;
    int engine_failures = 0;
    std::vector<std::string> warnings;
};

struct ObjectivePoint {
    double y_l = 0.0;      // final test error of the completed run
    std::int64_t y_i = 0;  // total training epochs including completion
};

/// Replays the random-search protocol: a seed-deterministic permutation of
/// the benchmark's candidates, one epoch charged per training step until
/// the policy stops or i_max is reached, and after every iteration the
/// anytime outcome of selecting the current top-k and completing them.
/// Traces are bit-reproducible for a fixed (benchmark, config). A run
/// requesting more iterations than the benchmark holds samples without
/// replacement up to exhaustion and records a warning.
SimulationTrace run(const curves::Benchmark& benchmark, const RunConfig& config,
                    std::shared_ptr<lce::ExtrapolationCache> cache = nullptr,
                    std::shared_ptr<const lce::HorizonExtrapolator> extrapolator = nullptr);

/// Indices of the top_k records with the smallest observed validation
/// error, best first; ties break toward the earlier stream position.
std::vector<std::size_t> select_topk(std::span<const CandidateRecord> records, int top_k);

struct CompletionOutcome {
    std::int64_t surcharge_epochs = 0;  // full i_max per selected candidate not already complete
    double final_valid_error = 0.0;
    double final_test_error = 0.0;
    std::string winner_id;
};

/// Trains the selection to completion (retrain from scratch: a candidate
/// stopped early is charged the full i_max) and scores the winner, the
/// selected candidate with the lowest validation error at i_max. Ties break
/// toward the earlier stream position.
CompletionOutcome complete_and_score(std::span<const CandidateRecord> records,
                                     std::span<const std::size_t> selection,
                                     const curves::Benchmark& benchmark);

/// Last anytime entry of a completed trace.
ObjectivePoint objective_point(const SimulationTrace& trace);

/// Anytime file: provenance comments, then one row per iteration.
std::string format_trace(const SimulationTrace& trace, std::string_view benchmark_name,
                         std::string_view digest);

/// One-row summary record (policy, parameter, seed, y_L, y_I).
std::string format_summary(const SimulationTrace& trace, std::string_view benchmark_name,
                           std::string_view benchmark_path, std::string_view digest);

void write_file(const std::filesystem::path& path, std::string_view content);

} // namespace lcsim::sim
