// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lcsim/curve_store.hpp"
#include "lcsim/policies.hpp"
#include "lcsim/simulator.hpp"
#include "lcsim/synthetic.hpp"

namespace lcsim::exp {

struct PolicySweep {
    policy::PolicyKind kind = policy::PolicyKind::IEpoch;
    std::vector<double> values;
};

/// The full experiment: benchmark x policy x parameter x seed. Defaults
/// mirror the replay protocol: 200 iterations, top-3 completion, seeds 0..9,
/// and the standard aggressiveness sweeps (i in 1..100, rho in
/// {0.5, 0.7, 0.8, 0.9, 0.95}, r in {2^(1/4), 2^(1/2), 2, 4, ..., 64}).
struct ExperimentGrid {
    std::vector<std::string> benchmark_paths;
    std::vector<PolicySweep> policies;
    std::vector<std::uint64_t> seeds;
    int n_iterations = 200;
    int top_k = 3;
    policy::EngineSettings engine{};
    std::string out_dir;

    void validate() const;  // throws ConfigError
};

std::vector<PolicySweep> default_policy_sweeps();
std::vector<std::uint64_t> default_seeds();  // 0..9; the original study's seeds are unpublished

ExperimentGrid grid_from_json_file(const std::filesystem::path& path);
curves::SyntheticSpec synthetic_spec_from_json_file(const std::filesystem::path& path);

struct Cell {
    std::string benchmark_name;
    std::size_t benchmark_index = 0;
    policy::PolicySpec policy{};
    std::uint64_t seed = 0;
};

/// Deterministic cell enumeration for one benchmark of the grid.
std::vector<Cell> enumerate_cells(const ExperimentGrid& grid,
                                  std::span<const std::string> benchmark_names);

std::string cell_basename(const Cell& cell);

/// Digest covering everything that determines a cell's outputs.
std::string cell_digest(const ExperimentGrid& grid, const Cell& cell,
                        const curves::Benchmark& benchmark);

struct SimulateOptions {
    std::filesystem::path out_dir;
    int jobs = 1;
    bool resume = true;
};

struct SimulateReport {
    int total = 0;
    int executed = 0;
    int skipped = 0;
    int failed = 0;
    std::vector<std::string> failures;
};

/// Runs every cell, one trace + one summary file each. Completed cells
/// (matching digest) are skipped when resuming; per-cell failures are
/// recorded and the remaining cells still run.
SimulateReport run_grid(const ExperimentGrid& grid, const SimulateOptions& options);

struct AnalyzeOptions {
    std::filesystem::path results_dir;
    std::filesystem::path out_dir;
    int curve_rank_sample = 500;
    std::uint64_t curve_rank_seed = 0;
};

/// Aggregates summary and trace files into anytime curves, Pareto/HVI
/// tables, the cross-benchmark average-rank table, and curve-rank exports.
/// Throws ValidationError when the results directory holds no summaries.
void analyze(const AnalyzeOptions& options);

} // namespace lcsim::exp
