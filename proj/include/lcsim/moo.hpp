// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "lcsim/curve_store.hpp"

namespace lcsim::moo {

/// One outcome in objective space; both coordinates are minimized.
struct Point {
    double y_l = 0.0;  // final generalization error
    double y_i = 0.0;  // total training epochs

    bool operator==(const Point&) const = default;
};

/// p dominates q iff p <= q component-wise and p != q.
bool dominates(const Point& p, const Point& q);

/// Non-dominated subset, duplicates collapsed, sorted ascending by y_i.
struct ParetoFront {
    std::vector<Point> points;
};

ParetoFront pareto_front(std::span<const Point> points);

/// Seed-aggregated objective statistics of one (method, parameter) cell.
struct MethodCell {
    std::string method;
    double parameter = 0.0;
    double mean_yl = 0.0;
    double se_yl = 0.0;
    double mean_yi = 0.0;
    double se_yi = 0.0;
    int n_seeds = 0;
};

/// Element-wise upper bound of observations: the component-wise maximum of
/// (mean + standard error) over all cells.
Point reference_point(std::span<const MethodCell> cells);

/// Area between the front and the reference point after a log10 transform
/// of both coordinates. y_l values <= 0 clip to 1e-12 before the transform;
/// points outside the reference box contribute zero. Throws ValidationError
/// when a non-positive coordinate survives clipping (including the
/// reference itself).
double hypervolume_2d(const ParetoFront& front, Point reference);

struct RelativeHvi {
    std::map<std::string, double> by_method;  // each in [0, 1]
    double union_hypervolume = 0.0;
};

/// Each method's hypervolume divided by the hypervolume of the union front;
/// the union scores exactly 1 by construction. Throws ValidationError when
/// the union front collapses onto the reference point.
RelativeHvi relative_hvi(const std::map<std::string, std::vector<Point>>& per_method,
                         std::span<const MethodCell> cells);

/// Mean rank per method across per-dataset relative-HVI tables; rank 1 is
/// the largest value, ties share the mean of their positions. Every table
/// must contain every method.
std::map<std::string, double> average_rank(
    std::span<const std::map<std::string, double>> tables);

struct CurveRankRecord {
    std::string candidate_id;
    int final_rank = 0;  // 1 = best within the sample
    std::vector<double> valid_error;
    bool worse_than_constant = false;  // final validation error > 1 (the 1 - R^2 scale)
};

struct CurveRankExport {
    std::vector<CurveRankRecord> records;
    double fraction_worse_than_constant = 0.0;  // over the whole benchmark
    double spearman_epoch1_final = 0.0;         // over the whole benchmark
};

/// Seed-deterministic sample of curves with their final ranking, plus
/// benchmark-level diagnostics of how informative epoch 1 is.
CurveRankExport curve_rank_export(const curves::Benchmark& benchmark, int sample_size,
                                  std::uint64_t seed);

} // namespace lcsim::moo
