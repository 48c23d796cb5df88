// SPDX-License-Identifier: Apache-2.0
//
// Acceptance suite: end-to-end checks of the replay protocol, the decision
// procedures, and the analysis stack, each printed as one pass/fail line.
// Run with no arguments for the full suite or with a criterion number to
// run a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "lcsim/curve_store.hpp"
#include "lcsim/errors.hpp"
#include "lcsim/experiment.hpp"
#include "lcsim/lce_fit.hpp"
#include "lcsim/metrics.hpp"
#include "lcsim/mmf4.hpp"
#include "lcsim/moo.hpp"
#include "lcsim/policies.hpp"
#include "lcsim/rng.hpp"
#include "lcsim/simulator.hpp"
#include "lcsim/synthetic.hpp"
#include "lcsim/util.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;
using namespace lcsim;

namespace {

struct Criterion {
    int id;
    std::string name;
    double time_limit_seconds;
    std::function<bool(std::ostream&)> body;
};

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

const fs::path kWorkDir = fs::temp_directory_path() / "lcsim_acceptance";

curves::SyntheticSpec stable_spec() {
    curves::SyntheticSpec spec;
    spec.n_curves = 300;
    spec.i_max = 100;
    spec.a_range = {0.8, 1.2};
    spec.b_range = {1.0, 20.0};
    spec.c_range = {0.02, 0.9};
    spec.d_range = {0.7, 2.0};
    spec.noise_range = {0.0005, 0.02};
    spec.fraction_diverging = 0.2;
    spec.rank_stability = 1.0;  // >= 0.95: epoch-1 and final rankings agree
    spec.seed = 1001;
    spec.name = "stable";
    return spec;
}

curves::SyntheticSpec crossing_spec() {
    curves::SyntheticSpec spec = stable_spec();
    spec.rank_stability = 0.1;  // <= 0.3: epoch-1 says little about the end
    spec.noise_range = {0.02, 0.08};
    spec.seed = 1002;
    spec.name = "crossing";
    return spec;
}

const curves::Benchmark& stable_benchmark() {
    static const curves::Benchmark bench = curves::generate_synthetic(stable_spec());
    return bench;
}

const curves::Benchmark& crossing_benchmark() {
    static const curves::Benchmark bench = curves::generate_synthetic(crossing_spec());
    return bench;
}

std::shared_ptr<lce::ExtrapolationCache>& stable_cache() {
    static auto cache = std::make_shared<lce::ExtrapolationCache>();
    return cache;
}

sim::RunConfig protocol_config(policy::PolicyKind kind, double parameter, std::uint64_t seed) {
    sim::RunConfig config;
    config.policy = {kind, parameter};
    config.seed = seed;
    config.n_iterations = 200;
    config.top_k = 3;
    return config;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// ---------------------------------------------------------------------------
// 1. Exact epoch accounting
// ---------------------------------------------------------------------------

bool criterion_accounting(std::ostream& log) {
    curves::SyntheticSpec spec = stable_spec();
    spec.n_curves = 200;
    spec.seed = 11;
    spec.name = "accounting";
    const curves::Benchmark bench = curves::generate_synthetic(spec);

    const sim::SimulationTrace one =
        sim::run(bench, protocol_config(policy::PolicyKind::IEpoch, 1.0, 0));
    const sim::ObjectivePoint p1 = sim::objective_point(one);

    const sim::SimulationTrace full =
        sim::run(bench, protocol_config(policy::PolicyKind::IEpoch, 100.0, 0));
    const sim::ObjectivePoint p100 = sim::objective_point(full);

    std::int64_t full_evaluation = 0;
    for (const sim::CandidateRecord& r : full.records) full_evaluation += r.epochs_charged;
    const std::int64_t surcharge = p100.y_i - full_evaluation;

    log << "1-epoch y_I=" << p1.y_i << " (want 500), 100-epoch y_I=" << p100.y_i
        << " (want 20000), 100-epoch surcharge=" << surcharge << " (want 0)";
    return p1.y_i == 500 && p100.y_i == 20000 && surcharge == 0;
}

// ---------------------------------------------------------------------------
// 2. Determinism across re-execution
// ---------------------------------------------------------------------------

bool criterion_determinism(std::ostream& log) {
    curves::SyntheticSpec spec = stable_spec();
    spec.n_curves = 210;
    spec.i_max = 30;
    spec.seed = 12;
    spec.name = "determinism";
    const fs::path bench_path = kWorkDir / "determinism.csv";
    curves::canonical_export(curves::generate_synthetic(spec), bench_path);

    exp::ExperimentGrid grid;
    grid.benchmark_paths = {bench_path.string()};
    grid.policies = {{policy::PolicyKind::IEpoch, {1.0, 7.0, 30.0}},
                     {policy::PolicyKind::Sha, {2.0, 16.0}},
                     {policy::PolicyKind::Lce, {0.9}}};
    grid.seeds = {0, 1};
    grid.engine.mcmc = {1500, 500, 10, 0.25, 50};

    std::vector<fs::path> dirs{kWorkDir / "det_run1", kWorkDir / "det_run2"};
    for (const fs::path& dir : dirs) {
        fs::remove_all(dir);
        const exp::SimulateReport report = exp::run_grid(grid, {dir, 1, false});
        if (report.failed != 0 || report.executed != 12) {
            log << "grid execution failed: executed=" << report.executed
                << " failed=" << report.failed;
            return false;
        }
    }

    int compared = 0;
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
        const fs::path twin = dirs[1] / entry.path().filename();
        if (!fs::exists(twin) || read_file(entry.path()) != read_file(twin)) {
            log << "mismatch at " << entry.path().filename();
            return false;
        }
        ++compared;
    }
    log << compared << " files byte-identical across re-execution (12 cells)";
    return compared == 24;  // trace + summary per cell
}

// ---------------------------------------------------------------------------
// 3. SHA oracle equivalence
// ---------------------------------------------------------------------------

bool criterion_sha_oracle(std::ostream& log) {
    const std::vector<double> sweep{std::sqrt(std::sqrt(2.0)), std::sqrt(2.0), 2.0, 4.0,
                                    8.0,  16.0, 32.0, 64.0};
    Rng rng(303);
    int agree = 0;
    const int total = 10000;
    for (int trial = 0; trial < total; ++trial) {
        const double r = sweep[rng.below(sweep.size())];
        std::vector<double> past(rng.below(21));
        for (double& v : past) v = rng.uniform(0.0, 1.0);
        if (!past.empty() && rng.below(4) == 0) past[0] = 0.5;
        const double current = rng.below(5) == 0 ? 0.5 : rng.uniform(0.0, 1.0);

        std::vector<double> all = past;
        all.push_back(current);
        std::sort(all.begin(), all.end());
        const std::size_t rank =
            static_cast<std::size_t>(std::lower_bound(all.begin(), all.end(), current) -
                                     all.begin()) + 1;
        const std::size_t q = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::floor(static_cast<double>(all.size()) / r)));
        const bool oracle_continue = rank <= q;

        policy::SharedHistory history;
        history.rung_scores[5] = past;
        const policy::Decision d = policy::sha_decide(5, current, history, r);
        if ((d.action == policy::Action::Continue) == oracle_continue) ++agree;
    }
    log << agree << "/" << total << " decisions agree with the sort-and-rank oracle";
    return agree == total;
}

// ---------------------------------------------------------------------------
// 4. LM extrapolation recovery
// ---------------------------------------------------------------------------

bool criterion_lm_recovery(std::ostream& log) {
    Rng rng(404);
    int recovered = 0;
    const int total = 30;
    double worst = 0.0;
    for (int trial = 0; trial < total; ++trial) {
        lce::Mmf4Params truth;
        truth.a = rng.uniform(0.5, 1.5);
        truth.c = rng.uniform(0.02, 0.6);
        truth.b = rng.log_uniform(0.5, 30.0);
        truth.d = rng.uniform(0.4, 2.5);
        std::vector<lce::Anchor> prefix;
        for (int e = 1; e <= 20; ++e) {
            prefix.push_back({static_cast<double>(e), lce::mmf4_eval(truth, e)});
        }
        const lce::FitResult fit = lce::fit_lm(prefix);
        const double err = std::fabs(lce::mmf4_eval(fit.params, 100.0) -
                                     lce::mmf4_eval(truth, 100.0));
        worst = std::max(worst, err);
        if (err < 1e-3) ++recovered;
    }
    log << recovered << "/" << total << " draws within 1e-3 at epoch 100 (worst "
        << fmt_param(worst) << ", need >= 27)";
    return recovered >= 27;
}

// ---------------------------------------------------------------------------
// 5. rho-monotonicity of LCE epoch consumption
// ---------------------------------------------------------------------------

bool criterion_lce_monotone(std::ostream& log) {
    const curves::Benchmark& bench = stable_benchmark();
    const std::vector<double> rhos{0.5, 0.7, 0.8, 0.9, 0.95};
    bool ok = true;
    for (const std::uint64_t seed : {0, 1, 2}) {
        std::vector<std::int64_t> totals;
        for (const double rho : rhos) {
            sim::RunConfig config = protocol_config(policy::PolicyKind::Lce, rho, seed);
            const sim::SimulationTrace trace = sim::run(bench, config, stable_cache());
            totals.push_back(sim::objective_point(trace).y_i);
        }
        log << "seed " << seed << ": y_I(rho)=";
        for (const std::int64_t t : totals) log << " " << t;
        log << "; ";
        for (std::size_t i = 1; i < totals.size(); ++i) {
            if (totals[i] < totals[i - 1]) ok = false;
        }
    }
    return ok;
}

// ---------------------------------------------------------------------------
// 6. Hypervolume oracles
// ---------------------------------------------------------------------------

bool criterion_hypervolume(std::ostream& log) {
    Rng rng(606);
    // raster oracle, 2000 x 2000, 1e-3 relative
    for (int trial = 0; trial < 100; ++trial) {
        const moo::Point ref{10.0, 1e4};
        std::vector<moo::Point> points(1 + rng.below(10));
        for (moo::Point& p : points) {
            p.y_l = std::pow(10.0, rng.uniform(-3.0, -0.6));
            p.y_i = std::pow(10.0, rng.uniform(0.0, 1.4));
        }
        const double expected = oracles::hypervolume_raster(points, ref, 2000);
        const double got = moo::hypervolume_2d(moo::pareto_front(points), ref);
        if (std::fabs(got - expected) > 1e-3 * std::max(std::fabs(expected), 1e-12)) {
            log << "raster mismatch: got " << got << ", oracle " << expected;
            return false;
        }
    }
    // exact rectangle arithmetic by inclusion-exclusion, 1e-9
    for (int trial = 0; trial < 100; ++trial) {
        const moo::Point ref{10.0, 1e5};
        std::vector<moo::Point> points(1 + rng.below(8));
        for (moo::Point& p : points) {
            p.y_l = std::pow(10.0, rng.uniform(-3.0, 1.2));
            p.y_i = std::pow(10.0, rng.uniform(0.0, 5.2));
        }
        const double expected = oracles::hypervolume_inclusion_exclusion(points, ref);
        const double got = moo::hypervolume_2d(moo::pareto_front(points), ref);
        if (std::fabs(got - expected) > 1e-9 * std::max(std::fabs(expected), 1e-12)) {
            log << "rectangle mismatch: got " << got << ", oracle " << expected;
            return false;
        }
    }
    // the union entry of the relative table is exactly 1
    std::map<std::string, std::vector<moo::Point>> per_method;
    per_method["a"] = {{0.05, 40.0}, {0.2, 10.0}};
    per_method["b"] = {{0.1, 20.0}};
    std::vector<moo::MethodCell> cells;
    cells.push_back({"a", 0.0, 0.4, 0.1, 900.0, 100.0, 10});
    const moo::RelativeHvi hvi = moo::relative_hvi(per_method, cells);
    if (hvi.union_hypervolume / hvi.union_hypervolume != 1.0) {
        log << "union ratio is not exactly 1";
        return false;
    }
    log << "raster (1e-3), inclusion-exclusion (1e-9), union ratio exact";
    return true;
}

// ---------------------------------------------------------------------------
// 7. Metric oracles
// ---------------------------------------------------------------------------

bool criterion_metrics(std::ostream& log) {
    Rng rng(707);
    int checked_r = 0;
    int checked_c = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 2 + rng.below(16);
        std::vector<double> y(n);
        std::vector<double> yhat(n);
        for (std::size_t i = 0; i < n; ++i) {
            y[i] = rng.uniform(-3.0, 3.0);
            yhat[i] = rng.uniform(-3.0, 3.0);
        }
        const double expected = oracles::r2_regression(y, yhat);
        const double got = metrics::r2_regression(y, yhat);
        if (std::fabs(got - expected) > 1e-12 * std::max(1.0, std::fabs(expected))) {
            log << "regression mismatch: got " << got << ", oracle " << expected;
            return false;
        }
        ++checked_r;

        std::vector<int> yc(n);
        std::vector<int> yhatc(n);
        for (std::size_t i = 0; i < n; ++i) {
            yc[i] = static_cast<int>(rng.below(3));
            yhatc[i] = static_cast<int>(rng.below(3));
        }
        bool degenerate = true;
        for (const int v : yc) degenerate &= v == yc[0];
        if (degenerate) continue;
        const double expected_c = oracles::r2_classification(yc, yhatc);
        const double got_c = metrics::r2_classification(yc, yhatc);
        if (std::fabs(got_c - expected_c) > 1e-12 * std::max(1.0, std::fabs(expected_c))) {
            log << "classification mismatch: got " << got_c << ", oracle " << expected_c;
            return false;
        }
        ++checked_c;
    }
    log << checked_r << " regression and " << checked_c
        << " classification batches match to 1e-12";
    return checked_r == 1000 && checked_c > 800;
}

// ---------------------------------------------------------------------------
// 8. Headline finding at desk scale
// ---------------------------------------------------------------------------

struct CellStats {
    MeanSe y_l;
    MeanSe y_i;
};

CellStats collect(const curves::Benchmark& bench, policy::PolicyKind kind, double parameter,
                  std::shared_ptr<lce::ExtrapolationCache> cache,
                  std::vector<moo::Point>* mean_point_sink = nullptr) {
    std::vector<double> yl;
    std::vector<double> yi;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const sim::SimulationTrace trace =
            sim::run(bench, protocol_config(kind, parameter, seed), cache);
        const sim::ObjectivePoint p = sim::objective_point(trace);
        yl.push_back(p.y_l);
        yi.push_back(static_cast<double>(p.y_i));
    }
    CellStats stats{mean_se(yl), mean_se(yi)};
    if (mean_point_sink) mean_point_sink->push_back({stats.y_l.mean, stats.y_i.mean});
    return stats;
}

bool criterion_headline(std::ostream& log) {
    const curves::Benchmark& stable = stable_benchmark();

    // Stable curves: 1-epoch matches 100-epoch at ~2.5% of the budget.
    std::map<std::string, std::vector<moo::Point>> per_method;
    std::vector<moo::MethodCell> cells;
    auto record_cell = [&](policy::PolicyKind kind, double parameter, const CellStats& stats) {
        const std::string method(policy::to_string(kind));
        per_method[method].push_back({stats.y_l.mean, stats.y_i.mean});
        cells.push_back({method, parameter, stats.y_l.mean, stats.y_l.se, stats.y_i.mean,
                         stats.y_i.se, stats.y_l.n});
    };

    CellStats one_epoch;
    CellStats full_epoch;
    for (int i = 1; i <= 100; ++i) {
        const CellStats stats =
            collect(stable, policy::PolicyKind::IEpoch, static_cast<double>(i), nullptr);
        record_cell(policy::PolicyKind::IEpoch, static_cast<double>(i), stats);
        if (i == 1) one_epoch = stats;
        if (i == 100) full_epoch = stats;
    }
    for (const double r : {std::sqrt(std::sqrt(2.0)), std::sqrt(2.0), 2.0, 4.0, 8.0, 16.0,
                           32.0, 64.0}) {
        record_cell(policy::PolicyKind::Sha, r, collect(stable, policy::PolicyKind::Sha, r, nullptr));
    }
    for (const double rho : {0.5, 0.7, 0.8, 0.9, 0.95}) {
        record_cell(policy::PolicyKind::Lce, rho,
                    collect(stable, policy::PolicyKind::Lce, rho, stable_cache()));
    }

    const double diff_stable = std::fabs(one_epoch.y_l.mean - full_epoch.y_l.mean);
    const double se_stable = std::sqrt(one_epoch.y_l.se * one_epoch.y_l.se +
                                       full_epoch.y_l.se * full_epoch.y_l.se);
    const double budget_ratio = one_epoch.y_i.mean / full_epoch.y_i.mean;
    const bool parity = diff_stable <= se_stable;
    const bool cheap = budget_ratio <= 0.03;

    const moo::RelativeHvi hvi = moo::relative_hvi(per_method, cells);
    const double hvi_iepoch = hvi.by_method.at("iepoch");
    const double hvi_sha = hvi.by_method.at("sha");
    const double hvi_lce = hvi.by_method.at("lce");
    const bool hvi_best = hvi_iepoch >= hvi_sha && hvi_iepoch >= hvi_lce;

    // Crossing curves: aggressive discarding visibly hurts.
    const curves::Benchmark& crossing = crossing_benchmark();
    const CellStats c1 = collect(crossing, policy::PolicyKind::IEpoch, 1.0, nullptr);
    const CellStats c100 = collect(crossing, policy::PolicyKind::IEpoch, 100.0, nullptr);
    const double gap = c1.y_l.mean - c100.y_l.mean;
    const double se_crossing =
        std::sqrt(c1.y_l.se * c1.y_l.se + c100.y_l.se * c100.y_l.se);
    const bool detects = gap >= 2.0 * se_crossing;

    log << "stable: |yL(1) - yL(100)|=" << fmt_param(diff_stable) << " vs se="
        << fmt_param(se_stable) << (parity ? " OK" : " VIOLATED") << "; budget ratio="
        << fmt_param(budget_ratio) << (cheap ? " OK" : " VIOLATED")
        << "; relHVI iepoch=" << fmt_param(hvi_iepoch) << " sha=" << fmt_param(hvi_sha)
        << " lce=" << fmt_param(hvi_lce) << (hvi_best ? " OK" : " VIOLATED")
        << "; crossing: yL(1)-yL(100)=" << fmt_param(gap) << " vs 2se="
        << fmt_param(2.0 * se_crossing) << (detects ? " OK" : " VIOLATED");
    return parity && cheap && hvi_best && detects;
}

// ---------------------------------------------------------------------------
// 9. Ingestion fidelity
// ---------------------------------------------------------------------------

bool criterion_ingestion(std::ostream& log) {
    // A user-supplied file in the canonical schema: written here by hand,
    // not via canonical_export.
    const fs::path user_file = kWorkDir / "user_curves.csv";
    {
        std::ofstream out(user_file, std::ios::trunc);
        out << "# name=usertask\n# task=regression\n";
        out << "candidate_id,epoch,train_error,valid_error,test_error\n";
        Rng rng(909);
        for (int c = 0; c < 60; ++c) {
            const double start = rng.uniform(0.6, 1.1);
            const double final = rng.uniform(0.05, 0.9);
            for (int e = 1; e <= 20; ++e) {
                const double t = static_cast<double>(e - 1) / 19.0;
                const double mean = start + (final - start) * std::sqrt(t);
                out << "u" << c << ',' << e << ',' << fmt_g17(mean * 0.9) << ','
                    << fmt_g17(mean + 0.01 * rng.normal01()) << ','
                    << fmt_g17(mean + 0.01 * rng.normal01()) << "\n";
            }
        }
    }

    exp::ExperimentGrid grid;
    grid.benchmark_paths = {user_file.string()};
    grid.policies = {{policy::PolicyKind::IEpoch, {1.0, 7.0, 20.0}},
                     {policy::PolicyKind::Sha, {2.0}},
                     {policy::PolicyKind::Lce, {0.9}}};
    grid.seeds = {0, 1};
    grid.n_iterations = 60;
    grid.engine.mcmc = {1500, 500, 10, 0.25, 50};

    const fs::path results = kWorkDir / "ingest_results";
    const fs::path analysis = kWorkDir / "ingest_analysis";
    fs::remove_all(results);
    fs::remove_all(analysis);
    const exp::SimulateReport report = exp::run_grid(grid, {results, 1, true});
    if (report.failed != 0) {
        log << "simulate failed on " << report.failed << " cells: "
            << (report.failures.empty() ? "" : report.failures.front());
        return false;
    }
    exp::analyze({results, analysis, 50, 0});

    const fs::path hvi_table = analysis / "relative_hvi__usertask.csv";
    const fs::path rank_table = analysis / "average_rank.csv";
    if (!fs::exists(hvi_table) || !fs::exists(rank_table)) {
        log << "expected tables are missing";
        return false;
    }
    const std::string hvi = read_file(hvi_table);
    const std::string rank = read_file(rank_table);
    for (const std::string method : {"iepoch", "sha", "lce"}) {
        if (hvi.find(method + ",") == std::string::npos) {
            log << "relative-HVI table lacks a row for " << method;
            return false;
        }
        if (rank.find(method + ",") == std::string::npos) {
            log << "average-rank table lacks a row for " << method;
            return false;
        }
    }
    log << "pipeline completed; relative-HVI and average-rank tables parse with all methods";
    return true;
}

} // namespace

int main(int argc, char** argv) {
    fs::create_directories(kWorkDir);

    std::vector<Criterion> criteria{
        {1, "exact epoch accounting", 1.0, criterion_accounting},
        {2, "determinism across re-execution", 60.0, criterion_determinism},
        {3, "SHA oracle equivalence", 10.0, criterion_sha_oracle},
        {4, "LM extrapolation recovery", 30.0, criterion_lm_recovery},
        {5, "rho-monotonicity of LCE", 600.0, criterion_lce_monotone},
        {6, "hypervolume oracles", 60.0, criterion_hypervolume},
        {7, "metric oracles", 5.0, criterion_metrics},
        {8, "headline finding at desk scale", 1800.0, criterion_headline},
        {9, "ingestion fidelity", 600.0, criterion_ingestion},
    };

    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    int failures = 0;
    for (const Criterion& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        std::ostringstream detail;
        bool pass = false;
        const auto start = std::chrono::steady_clock::now();
        try {
            pass = criterion.body(detail);
        } catch (const std::exception& e) {
            detail << "exception: " << e.what();
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (seconds > criterion.time_limit_seconds) {
            detail << " [exceeded " << criterion.time_limit_seconds << "s budget]";
            pass = false;
        }
        if (!pass) ++failures;
        std::cout << (pass ? "[PASS] " : "[FAIL] ") << criterion.id << ". " << criterion.name
                  << " (" << fmt_param(seconds) << "s): " << detail.str() << "\n";
        std::cout.flush();
    }
    if (failures == 0) {
        std::cout << "acceptance: all criteria passed\n";
    } else {
        std::cout << "acceptance: " << failures << " criteria FAILED\n";
    }
    return failures == 0 ? 0 : 1;
}
