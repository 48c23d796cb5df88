// SPDX-License-Identifier: Apache-2.0
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lcsim/curve_store.hpp"
#include "lcsim/errors.hpp"
#include "lcsim/experiment.hpp"
#include "lcsim/synthetic.hpp"
#include "lcsim/util.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitPartialFailure = 2;
constexpr int kExitIo = 3;

int cmd_generate(const std::string& spec_path, const std::string& out_path) {
    const lcsim::curves::SyntheticSpec spec =
        lcsim::exp::synthetic_spec_from_json_file(spec_path);
    const lcsim::curves::Benchmark bench = lcsim::curves::generate_synthetic(spec);
    lcsim::curves::canonical_export(bench, out_path);
    std::cout << "benchmark '" << bench.name << "': " << bench.size() << " curves, i_max "
              << bench.i_max << ", worse-than-constant fraction "
              << lcsim::fmt_param(lcsim::curves::worse_than_constant_fraction(bench)) << "\n";
    std::cout << "wrote " << out_path << "\n";
    return kExitOk;
}

int cmd_ingest(const std::string& in_path, const std::string& schema_id,
               const std::string& task, const std::string& name, const std::string& out_path) {
    lcsim::curves::LoadOptions options;
    if (!task.empty()) options.task_kind = lcsim::curves::task_kind_from_string(task);
    if (!name.empty()) options.name = name;
    lcsim::curves::FilterReport report;
    const lcsim::curves::Benchmark bench = lcsim::curves::load_benchmark(
        in_path, lcsim::curves::schema_from_string(schema_id), options, &report);
    std::cout << report.to_string() << "\n";
    if (!out_path.empty()) {
        lcsim::curves::canonical_export(bench, out_path);
        std::cout << "wrote " << out_path << "\n";
    }
    return kExitOk;
}

int cmd_simulate(const std::string& grid_path, const std::string& out_dir,
                 const std::string& seed_list, int jobs, bool resume) {
    lcsim::exp::ExperimentGrid grid = lcsim::exp::grid_from_json_file(grid_path);
    if (!seed_list.empty()) {
        grid.seeds.clear();
        for (const std::string& s : lcsim::split(seed_list, ',')) {
            grid.seeds.push_back(static_cast<std::uint64_t>(lcsim::parse_int(s)));
        }
        grid.validate();
    }
    lcsim::exp::SimulateOptions options;
    if (!out_dir.empty()) options.out_dir = out_dir;
    else if (!grid.out_dir.empty()) options.out_dir = grid.out_dir;
    else options.out_dir = "results";
    options.jobs = jobs;
    options.resume = resume;
    const lcsim::exp::SimulateReport report = lcsim::exp::run_grid(grid, options);
    std::cout << "cells: total=" << report.total << " executed=" << report.executed
              << " skipped=" << report.skipped << " failed=" << report.failed << "\n";
    for (const std::string& f : report.failures) std::cerr << "cell failed: " << f << "\n";
    return report.failed > 0 ? kExitPartialFailure : kExitOk;
}

int cmd_analyze(const std::string& results_dir, const std::string& out_dir, int sample,
                std::uint64_t sample_seed) {
    lcsim::exp::AnalyzeOptions options;
    options.results_dir = results_dir;
    options.out_dir = out_dir;
    options.curve_rank_sample = sample;
    options.curve_rank_seed = sample_seed;
    lcsim::exp::analyze(options);
    std::cout << "wrote analysis tables to " << out_dir << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"lcsim: early-discarding policy evaluation on replayed learning curves"};
    app.require_subcommand(1);

    std::string spec_path;
    std::string out_path;
    CLI::App* generate = app.add_subcommand("generate", "generate a synthetic benchmark file");
    generate->add_option("--spec", spec_path, "synthetic spec JSON")->required();
    generate->add_option("--out", out_path, "output benchmark file")->required();

    std::string in_path;
    std::string schema_id = "canonical";
    std::string task;
    std::string name;
    std::string ingest_out;
    CLI::App* ingest = app.add_subcommand("ingest", "validate an external curve file");
    ingest->add_option("--in", in_path, "input curve file")->required();
    ingest->add_option("--schema", schema_id, "stored-value schema: canonical | r2");
    ingest->add_option("--task", task, "task kind: regression | classification");
    ingest->add_option("--name", name, "benchmark name override");
    ingest->add_option("--out", ingest_out, "canonical re-export path");

    std::string grid_path;
    std::string sim_out;
    std::string seed_list;
    int jobs = 1;
    bool resume = true;
    CLI::App* simulate = app.add_subcommand("simulate", "run the experiment grid");
    simulate->add_option("--grid", grid_path, "experiment grid JSON")->required();
    simulate->add_option("--out", sim_out, "results directory");
    simulate->add_option("--seed-list", seed_list, "comma-separated seed override");
    simulate->add_option("--jobs", jobs, "parallel cells");
    simulate->add_flag("--resume,!--no-resume", resume, "skip completed cells (default on)");

    std::string results_dir;
    std::string analyze_out;
    int sample = 500;
    std::uint64_t sample_seed = 0;
    CLI::App* analyze = app.add_subcommand("analyze", "aggregate results into report tables");
    analyze->add_option("--results", results_dir, "results directory")->required();
    analyze->add_option("--out", analyze_out, "output directory")->required();
    analyze->add_option("--curve-rank-sample", sample, "curves sampled for the rank export");
    analyze->add_option("--curve-rank-seed", sample_seed, "sampling seed for the rank export");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (generate->parsed()) return cmd_generate(spec_path, out_path);
        if (ingest->parsed()) return cmd_ingest(in_path, schema_id, task, name, ingest_out);
        if (simulate->parsed()) return cmd_simulate(grid_path, sim_out, seed_list, jobs, resume);
        if (analyze->parsed()) return cmd_analyze(results_dir, analyze_out, sample, sample_seed);
    } catch (const lcsim::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
