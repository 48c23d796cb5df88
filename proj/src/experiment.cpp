// SPDX-License-Identifier: Apache-2.0
#include "lcsim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "lcsim/errors.hpp"
#include "lcsim/moo.hpp"
#include "lcsim/util.hpp"

namespace lcsim::exp {

using nlohmann::json;

namespace {

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    try {
        return json::parse(in, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

curves::Range range_from_json(const json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigError(std::string(what) + " must be a [lo, hi] pair");
    }
    return {j[0].get<double>(), j[1].get<double>()};
}

policy::EngineSettings engine_from_json(const json& j) {
    policy::EngineSettings engine;
    if (j.contains("mcmc_steps")) engine.mcmc.steps = j["mcmc_steps"].get<int>();
    if (j.contains("mcmc_burn_in")) engine.mcmc.burn_in = j["mcmc_burn_in"].get<int>();
    if (j.contains("mcmc_thin")) engine.mcmc.thin = j["mcmc_thin"].get<int>();
    if (j.contains("fit_restarts")) engine.fit.restarts = j["fit_restarts"].get<int>();
    if (j.contains("fit_max_iterations")) engine.fit.max_iterations = j["fit_max_iterations"].get<int>();
    if (j.contains("seed")) engine.engine_seed = j["seed"].get<std::uint64_t>();
    if (j.contains("cache")) engine.cache_enabled = j["cache"].get<bool>();
    if (j.contains("check_cadence")) engine.check_cadence = j["check_cadence"].get<int>();
    return engine;
}

std::string engine_canonical(const policy::EngineSettings& e) {
    std::ostringstream os;
    os << "mcmc=" << e.mcmc.steps << "/" << e.mcmc.burn_in << "/" << e.mcmc.thin
       << ";fit=" << e.fit.restarts << "/" << e.fit.max_iterations << ";seed=" << e.engine_seed
       << ";cadence=" << e.check_cadence;
    return os.str();
}

struct SummaryRow {
    std::string benchmark;
    std::string benchmark_path;
    policy::PolicyKind kind{};
    std::string parameter;  // canonical display form, used as grouping key
    std::uint64_t seed = 0;
    double y_l = 0.0;
    std::int64_t y_i = 0;
};

SummaryRow parse_summary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    SummaryRow row;
    std::string line;
    bool header_seen = false;
    bool row_seen = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::size_t pos = line.find("benchmark_path=");
            if (pos != std::string::npos) {
                std::string rest = line.substr(pos + 15);
                const std::size_t sp = rest.find(' ');
                row.benchmark_path = rest.substr(0, sp);
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 6) throw ParseError(path.string() + ": expected 6 summary columns");
        row.benchmark = cols[0];
        row.kind = policy::policy_kind_from_string(cols[1]);
        row.parameter = cols[2];
        row.seed = static_cast<std::uint64_t>(parse_int(cols[3]));
        row.y_l = parse_double(cols[4]);
        row.y_i = parse_int(cols[5]);
        row_seen = true;
    }
    if (!row_seen) throw ParseError(path.string() + ": no summary row");
    return row;
}

struct TraceRows {
    std::vector<int> iteration;
    std::vector<double> cumulative_epochs;
    std::vector<double> final_valid;
    std::vector<double> final_test;
};

TraceRows parse_trace(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    TraceRows rows;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        const std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 5) throw ParseError(path.string() + ": expected 5 trace columns");
        rows.iteration.push_back(static_cast<int>(parse_int(cols[0])));
        rows.cumulative_epochs.push_back(static_cast<double>(parse_int(cols[1])));
        rows.final_valid.push_back(parse_double(cols[2]));
        rows.final_test.push_back(parse_double(cols[3]));
    }
    return rows;
}

std::string read_digest_comment(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) return {};
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') break;
        const std::size_t pos = line.find("digest=");
        if (pos != std::string::npos) {
            std::string rest = line.substr(pos + 7);
            const std::size_t sp = rest.find(' ');
            return rest.substr(0, sp);
        }
    }
    return {};
}

} // namespace

std::vector<PolicySweep> default_policy_sweeps() {
    std::vector<PolicySweep> sweeps;
    PolicySweep iepoch{policy::PolicyKind::IEpoch, {}};
    for (int i = 1; i <= 100; ++i) iepoch.values.push_back(static_cast<double>(i));
    sweeps.push_back(std::move(iepoch));
    sweeps.push_back({policy::PolicyKind::Sha,
                      {std::sqrt(std::sqrt(2.0)), std::sqrt(2.0), 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}});
    sweeps.push_back({policy::PolicyKind::Lce, {0.5, 0.7, 0.8, 0.9, 0.95}});
    return sweeps;
}

std::vector<std::uint64_t> default_seeds() {
    std::vector<std::uint64_t> seeds(10);
    for (std::uint64_t s = 0; s < 10; ++s) seeds[static_cast<std::size_t>(s)] = s;
    return seeds;
}

void ExperimentGrid::validate() const {
    if (benchmark_paths.empty()) throw ConfigError("grid: no benchmarks");
    if (policies.empty()) throw ConfigError("grid: no policies");
    for (const PolicySweep& sweep : policies) {
        if (sweep.values.empty()) throw ConfigError("grid: empty parameter sweep");
    }
    if (seeds.empty()) throw ConfigError("grid: no seeds");
    std::set<std::uint64_t> distinct(seeds.begin(), seeds.end());
    if (distinct.size() != seeds.size()) throw ConfigError("grid: seeds must be distinct");
    if (n_iterations < 1) throw ConfigError("grid: n_iterations must be >= 1");
    if (top_k < 1) throw ConfigError("grid: top_k must be >= 1");
}

ExperimentGrid grid_from_json_file(const std::filesystem::path& path) {
    const json j = load_json(path);
    ExperimentGrid grid;
    if (!j.contains("benchmarks")) throw ConfigError(path.string() + ": missing 'benchmarks'");
    for (const json& b : j["benchmarks"]) grid.benchmark_paths.push_back(b.get<std::string>());
    if (j.contains("policies")) {
        for (const json& p : j["policies"]) {
            PolicySweep sweep;
            sweep.kind = policy::policy_kind_from_string(p.at("kind").get<std::string>());
            for (const json& v : p.at("values")) sweep.values.push_back(v.get<double>());
            grid.policies.push_back(std::move(sweep));
        }
    } else {
        grid.policies = default_policy_sweeps();
    }
    if (j.contains("seeds")) {
        for (const json& s : j["seeds"]) grid.seeds.push_back(s.get<std::uint64_t>());
    } else {
        grid.seeds = default_seeds();
    }
    if (j.contains("n_iterations")) grid.n_iterations = j["n_iterations"].get<int>();
    if (j.contains("top_k")) grid.top_k = j["top_k"].get<int>();
    if (j.contains("engine")) grid.engine = engine_from_json(j["engine"]);
    if (j.contains("out")) grid.out_dir = j["out"].get<std::string>();
    grid.validate();
    return grid;
}

curves::SyntheticSpec synthetic_spec_from_json_file(const std::filesystem::path& path) {
    const json j = load_json(path);
    curves::SyntheticSpec spec;
    spec.n_curves = j.at("n_curves").get<int>();
    spec.i_max = j.at("i_max").get<int>();
    if (j.contains("a_range")) spec.a_range = range_from_json(j["a_range"], "a_range");
    if (j.contains("b_range")) spec.b_range = range_from_json(j["b_range"], "b_range");
    if (j.contains("c_range")) spec.c_range = range_from_json(j["c_range"], "c_range");
    if (j.contains("d_range")) spec.d_range = range_from_json(j["d_range"], "d_range");
    if (j.contains("noise_range")) spec.noise_range = range_from_json(j["noise_range"], "noise_range");
    if (j.contains("fraction_diverging")) spec.fraction_diverging = j["fraction_diverging"].get<double>();
    if (j.contains("rank_stability")) spec.rank_stability = j["rank_stability"].get<double>();
    if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("name")) spec.name = j["name"].get<std::string>();
    if (j.contains("task_kind")) {
        spec.task_kind = curves::task_kind_from_string(j["task_kind"].get<std::string>());
    }
    return spec;
}

std::vector<Cell> enumerate_cells(const ExperimentGrid& grid,
                                  std::span<const std::string> benchmark_names) {
    std::vector<Cell> cells;
    for (std::size_t b = 0; b < benchmark_names.size(); ++b) {
        for (const PolicySweep& sweep : grid.policies) {
            for (const double value : sweep.values) {
                for (const std::uint64_t seed : grid.seeds) {
                    cells.push_back({benchmark_names[b], b, {sweep.kind, value}, seed});
                }
            }
        }
    }
    return cells;
}

std::string cell_basename(const Cell& cell) {
    return sanitize_filename(cell.benchmark_name) + "__" +
           sanitize_filename(cell.policy.display()) + "__s" + std::to_string(cell.seed);
}

std::string cell_digest(const ExperimentGrid& grid, const Cell& cell,
                        const curves::Benchmark& benchmark) {
    std::ostringstream os;
    os << "bench=" << benchmark.name << ";prov=" << benchmark.provenance
       << ";curves=" << benchmark.size() << ";imax=" << benchmark.i_max
       << ";policy=" << policy::to_string(cell.policy.kind)
       << ";param=" << fmt_g17(cell.policy.parameter) << ";seed=" << cell.seed
       << ";iters=" << grid.n_iterations << ";topk=" << grid.top_k << ";"
       << engine_canonical(grid.engine);
    return hex64(fnv1a64(os.str()));
}

SimulateReport run_grid(const ExperimentGrid& grid, const SimulateOptions& options) {
    grid.validate();
    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create '" + options.out_dir.string() + "': " + ec.message());

    std::vector<curves::Benchmark> benchmarks;
    std::vector<std::string> names;
    std::vector<std::shared_ptr<lce::ExtrapolationCache>> caches;
    for (const std::string& path : grid.benchmark_paths) {
        benchmarks.push_back(curves::load_benchmark(path, curves::CurveSchema::Canonical));
        if (std::find(names.begin(), names.end(), benchmarks.back().name) != names.end()) {
            throw ConfigError("grid: duplicate benchmark name '" + benchmarks.back().name + "'");
        }
        names.push_back(benchmarks.back().name);
        caches.push_back(grid.engine.cache_enabled ? std::make_shared<lce::ExtrapolationCache>()
                                                   : nullptr);
    }

    const std::vector<Cell> cells = enumerate_cells(grid, names);
    SimulateReport report;
    report.total = static_cast<int>(cells.size());

    std::mutex mutex;
    std::atomic<std::size_t> next{0};
    const int jobs = std::max(1, options.jobs);

    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            const curves::Benchmark& bench = benchmarks[cell.benchmark_index];
            const std::string digest = cell_digest(grid, cell, bench);
            const std::string base = cell_basename(cell);
            const std::filesystem::path trace_path = options.out_dir / (base + ".trace.csv");
            const std::filesystem::path summary_path = options.out_dir / (base + ".summary.csv");

            if (options.resume && std::filesystem::exists(trace_path) &&
                std::filesystem::exists(summary_path) &&
                read_digest_comment(trace_path) == digest &&
                read_digest_comment(summary_path) == digest) {
                std::lock_guard lock(mutex);
                ++report.skipped;
                continue;
            }
            try {
                sim::RunConfig config;
                config.policy = cell.policy;
                config.seed = cell.seed;
                config.n_iterations = grid.n_iterations;
                config.top_k = grid.top_k;
                config.engine = grid.engine;
                const sim::SimulationTrace trace =
                    sim::run(bench, config, caches[cell.benchmark_index]);
                sim::write_file(trace_path, sim::format_trace(trace, bench.name, digest));
                sim::write_file(summary_path,
                                sim::format_summary(trace, bench.name,
                                                    grid.benchmark_paths[cell.benchmark_index],
                                                    digest));
                std::lock_guard lock(mutex);
                ++report.executed;
            } catch (const std::exception& e) {
                std::lock_guard lock(mutex);
                ++report.failed;
                report.failures.push_back(base + ": " + e.what());
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }
    return report;
}

namespace {

struct CellGroup {  // one (benchmark, policy, parameter) across seeds
    policy::PolicyKind kind{};
    std::string parameter;
    std::vector<double> y_l;
    std::vector<double> y_i;
};

void write_table(const std::filesystem::path& path, std::string_view provenance,
                 std::string_view header, const std::vector<std::string>& rows) {
    std::ostringstream os;
    os << "# " << provenance << "\n" << header << "\n";
    for (const std::string& r : rows) os << r << "\n";
    sim::write_file(path, os.str());
}

} // namespace

void analyze(const AnalyzeOptions& options) {
    std::vector<std::filesystem::path> summary_files;
    std::vector<std::filesystem::path> trace_files;
    if (!std::filesystem::is_directory(options.results_dir)) {
        throw ValidationError("results directory '" + options.results_dir.string() +
                              "' does not exist");
    }
    for (const auto& entry : std::filesystem::directory_iterator(options.results_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.ends_with(".summary.csv")) summary_files.push_back(entry.path());
        else if (name.ends_with(".trace.csv")) trace_files.push_back(entry.path());
    }
    std::sort(summary_files.begin(), summary_files.end());
    std::sort(trace_files.begin(), trace_files.end());
    if (summary_files.empty()) {
        throw ValidationError("no summary records in '" + options.results_dir.string() + "'");
    }

    std::error_code ec;
    std::filesystem::create_directories(options.out_dir, ec);
    if (ec) throw IoError("cannot create '" + options.out_dir.string() + "': " + ec.message());

    std::uint64_t digest_state = fnv1a64("lcsim-analyze");
    std::vector<SummaryRow> rows;
    for (const auto& path : summary_files) {
        rows.push_back(parse_summary(path));
        digest_state = fnv1a64(path.filename().string(), digest_state);
        digest_state = fnv1a64(fmt_g17(rows.back().y_l), digest_state);
        digest_state = fnv1a64(std::to_string(rows.back().y_i), digest_state);
    }
    const std::string provenance =
        "lcsim-analyze digest=" + hex64(digest_state) + " cells=" + std::to_string(rows.size());

    // benchmark -> (kind, parameter) -> seeds
    std::map<std::string, std::map<std::pair<int, std::string>, CellGroup>> grouped;
    std::map<std::string, std::string> benchmark_paths;
    for (const SummaryRow& row : rows) {
        auto& group = grouped[row.benchmark][{static_cast<int>(row.kind), row.parameter}];
        group.kind = row.kind;
        group.parameter = row.parameter;
        group.y_l.push_back(row.y_l);
        group.y_i.push_back(static_cast<double>(row.y_i));
        if (!row.benchmark_path.empty()) benchmark_paths[row.benchmark] = row.benchmark_path;
    }

    std::vector<std::map<std::string, double>> hvi_tables;
    std::vector<std::string> hvi_benchmarks;
    for (const auto& [bench, groups] : grouped) {
        std::vector<moo::MethodCell> cells;
        std::map<std::string, std::vector<moo::Point>> per_method;
        for (const auto& [key, group] : groups) {
            const MeanSe ml = mean_se(group.y_l);
            const MeanSe mi = mean_se(group.y_i);
            moo::MethodCell cell;
            cell.method = std::string(policy::to_string(group.kind));
            cell.parameter = parse_double(group.parameter);
            cell.mean_yl = ml.mean;
            cell.se_yl = ml.se;
            cell.mean_yi = mi.mean;
            cell.se_yi = mi.se;
            cell.n_seeds = ml.n;
            per_method[cell.method].push_back({cell.mean_yl, cell.mean_yi});
            cells.push_back(std::move(cell));
        }

        // Pareto table: per-method and union front membership of mean points.
        std::map<std::string, moo::ParetoFront> fronts;
        std::vector<moo::Point> all_points;
        for (const auto& [method, points] : per_method) {
            fronts[method] = moo::pareto_front(points);
            all_points.insert(all_points.end(), points.begin(), points.end());
        }
        const moo::ParetoFront union_front = moo::pareto_front(all_points);
        auto on_front = [](const moo::ParetoFront& front, const moo::Point& p) {
            return std::find(front.points.begin(), front.points.end(), p) != front.points.end();
        };
        std::vector<std::string> pareto_rows;
        for (const moo::MethodCell& cell : cells) {
            const moo::Point p{cell.mean_yl, cell.mean_yi};
            std::ostringstream os;
            os << cell.method << ',' << cell.parameter << ',' << fmt_g17(cell.mean_yl) << ','
               << fmt_g17(cell.se_yl) << ',' << fmt_g17(cell.mean_yi) << ',' << fmt_g17(cell.se_yi)
               << ',' << cell.n_seeds << ',' << (on_front(fronts[cell.method], p) ? 1 : 0) << ','
               << (on_front(union_front, p) ? 1 : 0);
            pareto_rows.push_back(os.str());
        }
        write_table(options.out_dir / ("pareto__" + sanitize_filename(bench) + ".csv"), provenance,
                    "method,parameter,mean_yL,se_yL,mean_yI,se_yI,n_seeds,on_method_front,on_union_front",
                    pareto_rows);

        // Relative hypervolume table. A benchmark whose union front collapses
        // onto the reference point (no conflict between the objectives) gets
        // a marker table and is excluded from the rank aggregation.
        const std::filesystem::path hvi_path =
            options.out_dir / ("relative_hvi__" + sanitize_filename(bench) + ".csv");
        try {
            const moo::RelativeHvi hvi = moo::relative_hvi(per_method, cells);
            std::vector<std::string> hvi_rows;
            for (const auto& [method, value] : hvi.by_method) {
                hvi_rows.push_back(method + "," + fmt_g17(value));
            }
            hvi_rows.push_back("all," + fmt_g17(hvi.union_hypervolume / hvi.union_hypervolume));
            write_table(hvi_path, provenance, "method,relative_hvi", hvi_rows);
            hvi_tables.push_back(hvi.by_method);
            hvi_benchmarks.push_back(bench);
        } catch (const ValidationError& e) {
            write_table(hvi_path, provenance + " degenerate=1 note=" + e.what(),
                        "method,relative_hvi", {});
        }

        // Curve-rank export when the benchmark file is still reachable.
        const auto path_it = benchmark_paths.find(bench);
        if (path_it != benchmark_paths.end() && std::filesystem::exists(path_it->second)) {
            const curves::Benchmark loaded =
                curves::load_benchmark(path_it->second, curves::CurveSchema::Canonical);
            const int sample =
                std::min(options.curve_rank_sample, static_cast<int>(loaded.size()));
            const moo::CurveRankExport export_data =
                moo::curve_rank_export(loaded, sample, options.curve_rank_seed);
            std::ostringstream os;
            os << "# " << provenance << "\n";
            os << "# fraction_worse_than_constant=" << fmt_g17(export_data.fraction_worse_than_constant)
               << "\n";
            os << "# spearman_epoch1_final=" << fmt_g17(export_data.spearman_epoch1_final) << "\n";
            os << "candidate_id,final_rank,worse_than_constant";
            for (int e = 1; e <= loaded.i_max; ++e) os << ",valid_e" << e;
            os << "\n";
            for (const moo::CurveRankRecord& rec : export_data.records) {
                os << rec.candidate_id << ',' << rec.final_rank << ','
                   << (rec.worse_than_constant ? 1 : 0);
                for (const double v : rec.valid_error) os << ',' << fmt_g17(v);
                os << "\n";
            }
            sim::write_file(options.out_dir / ("curve_rank__" + sanitize_filename(bench) + ".csv"),
                            os.str());
        }
    }

    // Average rank across benchmarks, over the methods present everywhere.
    if (!hvi_tables.empty()) {
        std::set<std::string> common;
        for (const auto& [method, value] : hvi_tables.front()) common.insert(method);
        for (const auto& table : hvi_tables) {
            std::set<std::string> present;
            for (const auto& [method, value] : table) present.insert(method);
            std::set<std::string> kept;
            std::ranges::set_intersection(common, present, std::inserter(kept, kept.begin()));
            common = std::move(kept);
        }
        if (!common.empty()) {
            std::vector<std::map<std::string, double>> restricted;
            for (const auto& table : hvi_tables) {
                std::map<std::string, double> r;
                for (const std::string& m : common) r[m] = table.at(m);
                restricted.push_back(std::move(r));
            }
            const std::map<std::string, double> ranks = moo::average_rank(restricted);
            std::vector<std::string> rank_rows;
            for (const auto& [method, rank] : ranks) {
                rank_rows.push_back(method + "," + fmt_g17(rank));
            }
            write_table(options.out_dir / "average_rank.csv", provenance, "method,average_rank",
                        rank_rows);
        }
    }

    // Anytime aggregates per (benchmark, policy, parameter) over seeds.
    std::map<std::string, std::vector<TraceRows>> anytime_groups;
    for (const auto& path : trace_files) {
        // filename: <bench>__<policy-param>__s<seed>.trace.csv
        const std::string stem = path.filename().string();
        const std::size_t tail = stem.rfind("__s");
        if (tail == std::string::npos) continue;
        anytime_groups[stem.substr(0, tail)].push_back(parse_trace(path));
    }
    for (const auto& [group_name, traces] : anytime_groups) {
        if (traces.empty()) continue;
        const std::size_t iterations = traces.front().iteration.size();
        bool consistent = true;
        for (const TraceRows& t : traces) consistent &= t.iteration.size() == iterations;
        if (!consistent || iterations == 0) continue;
        std::vector<std::string> out_rows;
        for (std::size_t i = 0; i < iterations; ++i) {
            std::vector<double> epochs;
            std::vector<double> valid;
            std::vector<double> test;
            for (const TraceRows& t : traces) {
                epochs.push_back(t.cumulative_epochs[i]);
                valid.push_back(t.final_valid[i]);
                test.push_back(t.final_test[i]);
            }
            const MeanSe me = mean_se(epochs);
            const MeanSe mv = mean_se(valid);
            const MeanSe mt = mean_se(test);
            std::ostringstream os;
            os << traces.front().iteration[i] << ',' << fmt_g17(me.mean) << ',' << fmt_g17(me.se)
               << ',' << fmt_g17(mv.mean) << ',' << fmt_g17(mv.se) << ',' << fmt_g17(mt.mean)
               << ',' << fmt_g17(mt.se);
            out_rows.push_back(os.str());
        }
        write_table(options.out_dir / ("anytime__" + group_name + ".csv"), provenance,
                    "iteration,mean_cumulative_epochs,se_cumulative_epochs,mean_final_valid_error,"
                    "se_final_valid_error,mean_final_test_error,se_final_test_error",
                    out_rows);
    }
}

} // namespace lcsim::exp
