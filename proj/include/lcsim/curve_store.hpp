// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lcsim::curves {

enum class TaskKind { Regression, Classification };

std::string_view to_string(TaskKind kind);
TaskKind task_kind_from_string(std::string_view s);

/// One candidate's fully tabulated learning curves on the 1 - R^2 error
/// scale. Index 0 holds epoch 1 (one full pass over the training data).
struct LearningCurve {
    std::string candidate_id;
    std::vector<double> train_error;
    std::vector<double> valid_error;
    std::vector<double> test_error;

    int epochs() const { return static_cast<int>(valid_error.size()); }

    bool operator==(const LearningCurve&) const = default;
};

/// A named, validated collection of learning curves. All curves cover
/// epochs 1..i_max; replay never interpolates.
struct Benchmark {
    std::string name;
    TaskKind task_kind = TaskKind::Classification;
    std::vector<LearningCurve> curves;
    int i_max = 0;
    std::string provenance;

    std::size_t size() const { return curves.size(); }

    bool operator==(const Benchmark&) const = default;
};

/// Ingestion accounting: what was read and why candidates were dropped.
struct FilterReport {
    std::int64_t records_read = 0;
    std::int64_t candidates_seen = 0;
    std::int64_t kept = 0;
    std::int64_t dropped_non_finite = 0;
    std::int64_t dropped_short = 0;
    std::int64_t dropped_malformed = 0;
    std::vector<std::string> warnings;

    std::int64_t dropped() const {
        return dropped_non_finite + dropped_short + dropped_malformed;
    }
    std::string to_string() const;
};

/// Stored-value interpretation of a tabular curve file. The adapter must be
/// told the stored metric explicitly; it is never guessed from the data.
enum class CurveSchema {
    Canonical,  // values already on the 1 - R^2 error scale
    R2,         // values store R^2; error = 1 - value
};

CurveSchema schema_from_string(std::string_view s);
std::string_view to_string(CurveSchema s);

struct LoadOptions {
    std::optional<TaskKind> task_kind;  // required when the file carries no metadata
    std::optional<std::string> name;
};

/// Parses and validates a tabular curve file. Candidates with non-finite
/// values, incomplete epoch coverage, or malformed records are dropped and
/// counted in `report`. Throws ParseError on unreadable records,
/// ValidationError when the header does not match the schema or when no
/// candidate survives filtering.
Benchmark load_benchmark(const std::filesystem::path& path, CurveSchema schema,
                         const LoadOptions& options = {}, FilterReport* report = nullptr);

/// Writes the canonical format: metadata comments, a mandatory header row,
/// then one record per (candidate, epoch) with round-trip decimal values.
/// load_benchmark on the output reproduces the benchmark exactly.
void canonical_export(const Benchmark& benchmark, const std::filesystem::path& path);

/// Fraction of curves whose final validation error exceeds 1.0 (worse than
/// the constant predictor).
double worse_than_constant_fraction(const Benchmark& benchmark);

} // namespace lcsim::curves
