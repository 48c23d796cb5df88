// SPDX-License-Identifier: Apache-2.0
#include "lcsim/simulator.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "lcsim/errors.hpp"
#include "lcsim/rng.hpp"
#include "lcsim/util.hpp"

namespace lcsim::sim {

namespace {

std::vector<std::size_t> candidate_order(std::size_t n, std::uint64_t seed) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    return order;
}

using CurveLookup = std::unordered_map<std::string_view, const curves::LearningCurve*>;

CurveLookup build_lookup(const curves::Benchmark& benchmark) {
    CurveLookup lookup;
    lookup.reserve(benchmark.size());
    for (const curves::LearningCurve& c : benchmark.curves) lookup.emplace(c.candidate_id, &c);
    return lookup;
}

CompletionOutcome complete_with_lookup(std::span<const CandidateRecord> records,
                                       std::span<const std::size_t> selection,
                                       const CurveLookup& lookup, int i_max) {
    if (selection.empty()) throw std::invalid_argument("complete_and_score: empty selection");

    CompletionOutcome out;
    std::size_t winner_idx = records.size();
    double winner_final_valid = 0.0;
    for (const std::size_t i : selection) {
        const CandidateRecord& rec = records[i];
        const auto it = lookup.find(rec.candidate_id);
        if (it == lookup.end()) {
            throw ValidationError("complete_and_score: unknown candidate '" + rec.candidate_id +
                                  "'");
        }
        const curves::LearningCurve& curve = *it->second;
        if (rec.stop_epoch < i_max) {
            out.surcharge_epochs += i_max;  // retrain from scratch
        }
        const double final_valid = curve.valid_error.back();
        if (winner_idx == records.size() || final_valid < winner_final_valid ||
            (final_valid == winner_final_valid && i < winner_idx)) {
            winner_idx = i;
            winner_final_valid = final_valid;
            out.final_valid_error = final_valid;
            out.final_test_error = curve.test_error.back();
            out.winner_id = curve.candidate_id;
        }
    }
    return out;
}

} // namespace

SimulationTrace run(const curves::Benchmark& benchmark, const RunConfig& config,
                    std::shared_ptr<lce::ExtrapolationCache> cache,
                    std::shared_ptr<const lce::HorizonExtrapolator> extrapolator) {
    if (benchmark.curves.empty()) throw ValidationError("run: empty benchmark");
    if (config.top_k < 1) throw ConfigError("run: top_k must be >= 1");
    if (config.n_iterations < 1) throw ConfigError("run: n_iterations must be >= 1");
    config.policy.validate(benchmark.i_max);

    SimulationTrace trace;
    trace.config = config;
    trace.benchmark_name = benchmark.name;
    trace.i_max = benchmark.i_max;

    int n_iter = config.n_iterations;
    if (static_cast<std::size_t>(n_iter) > benchmark.size()) {
        n_iter = static_cast<int>(benchmark.size());
        trace.warnings.push_back("benchmark holds " + std::to_string(benchmark.size()) +
                                 " candidates; sampling without replacement stops there instead of " +
                                 std::to_string(config.n_iterations) + " iterations");
    }
    trace.n_iterations_effective = n_iter;

    const std::vector<std::size_t> order = candidate_order(benchmark.size(), config.seed);
    const CurveLookup lookup = build_lookup(benchmark);
    const auto policy = policy::make_policy(config.policy, benchmark.i_max, config.engine,
                                            std::move(cache), std::move(extrapolator));

    policy::SharedHistory history;
    std::int64_t evaluation_epochs = 0;

    trace.records.reserve(static_cast<std::size_t>(n_iter));
    trace.anytime.reserve(static_cast<std::size_t>(n_iter));

    for (int k = 1; k <= n_iter; ++k) {
        const curves::LearningCurve& curve = benchmark.curves[order[static_cast<std::size_t>(k - 1)]];

        CandidateRecord rec;
        rec.candidate_id = curve.candidate_id;
        rec.stop_epoch = benchmark.i_max;
        rec.stop_reason = policy::Reason::EpochLimit;
        for (int e = 1; e <= benchmark.i_max; ++e) {
            const std::span<const double> prefix(curve.valid_error.data(),
                                                 static_cast<std::size_t>(e));
            const policy::Decision decision =
                policy->decide(curve.candidate_id, e, prefix, history);
            if (decision.action == policy::Action::Stop) {
                rec.stop_epoch = e;
                rec.stop_reason = decision.reason;
                break;
            }
        }
        rec.observed_valid_error = curve.valid_error[static_cast<std::size_t>(rec.stop_epoch - 1)];
        rec.epochs_charged = rec.stop_epoch;
        evaluation_epochs += rec.stop_epoch;
        if (rec.stop_epoch == benchmark.i_max) {
            history.note_completion(curve.valid_error.back());
        }
        trace.records.push_back(std::move(rec));

        const std::vector<std::size_t> selection =
            select_topk(trace.records, std::min(k, config.top_k));
        const CompletionOutcome outcome =
            complete_with_lookup(trace.records, selection, lookup, benchmark.i_max);
        trace.anytime.push_back({k, evaluation_epochs + outcome.surcharge_epochs,
                                 outcome.final_valid_error, outcome.final_test_error,
                                 outcome.winner_id});
    }
    trace.engine_failures = policy->engine_failures();
    return trace;
}

std::vector<std::size_t> select_topk(std::span<const CandidateRecord> records, int top_k) {
    if (top_k < 1) throw std::invalid_argument("select_topk: top_k must be >= 1");
    std::vector<std::size_t> idx(records.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::size_t k = std::min(records.size(), static_cast<std::size_t>(top_k));
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (records[a].observed_valid_error != records[b].observed_valid_error) {
                              return records[a].observed_valid_error < records[b].observed_valid_error;
                          }
                          return a < b;  // ties: earlier stream position wins
                      });
    idx.resize(k);
    return idx;
}

CompletionOutcome complete_and_score(std::span<const CandidateRecord> records,
                                     std::span<const std::size_t> selection,
                                     const curves::Benchmark& benchmark) {
    return complete_with_lookup(records, selection, build_lookup(benchmark), benchmark.i_max);
}

ObjectivePoint objective_point(const SimulationTrace& trace) {
    if (trace.anytime.empty()) throw ValidationError("objective_point: trace has no iterations");
    const AnytimeEntry& last = trace.anytime.back();
    return {last.final_test_error, last.cumulative_epochs};
}

std::string format_trace(const SimulationTrace& trace, std::string_view benchmark_name,
                         std::string_view digest) {
    std::ostringstream os;
    os << "# lcsim-trace benchmark=" << benchmark_name
       << " policy=" << policy::to_string(trace.config.policy.kind)
       << " parameter=" << fmt_param(trace.config.policy.parameter)
       << " seed=" << trace.config.seed << " n_iterations=" << trace.n_iterations_effective
       << " top_k=" << trace.config.top_k << " digest=" << digest << "\n";
    os << "# engine_failures=" << trace.engine_failures << "\n";
    for (const std::string& w : trace.warnings) os << "# warning=" << w << "\n";
    os << "iteration,cumulative_epochs,final_valid_error,final_test_error,selected_id\n";
    for (const AnytimeEntry& e : trace.anytime) {
        os << e.iteration << ',' << e.cumulative_epochs << ',' << fmt_g17(e.final_valid_error)
           << ',' << fmt_g17(e.final_test_error) << ',' << e.selected_candidate_id << "\n";
    }
    return os.str();
}

std::string format_summary(const SimulationTrace& trace, std::string_view benchmark_name,
                           std::string_view benchmark_path, std::string_view digest) {
    const ObjectivePoint obj = objective_point(trace);
    std::ostringstream os;
    os << "# lcsim-summary benchmark=" << benchmark_name << " benchmark_path=" << benchmark_path
       << " digest=" << digest << "\n";
    os << "benchmark,policy,parameter,seed,y_L,y_I\n";
    os << benchmark_name << ',' << policy::to_string(trace.config.policy.kind) << ','
       << fmt_param(trace.config.policy.parameter) << ',' << trace.config.seed << ','
       << fmt_g17(obj.y_l) << ',' << obj.y_i << "\n";
    return os.str();
}

void write_file(const std::filesystem::path& path, std::string_view content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
        if (!out) throw IoError("cannot write '" + tmp.string() + "'");
        out << content;
        if (!out) throw IoError("write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace lcsim::sim
