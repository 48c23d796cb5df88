// SPDX-License-Identifier: Apache-2.0
#include "lcsim/moo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "lcsim/errors.hpp"
#include "lcsim/rng.hpp"
#include "lcsim/util.hpp"

namespace lcsim::moo {

namespace {

constexpr double kYlFloor = 1e-12;

} // namespace

bool dominates(const Point& p, const Point& q) {
    return p.y_l <= q.y_l && p.y_i <= q.y_i && (p.y_l < q.y_l || p.y_i < q.y_i);
}

ParetoFront pareto_front(std::span<const Point> points) {
    if (points.empty()) throw std::invalid_argument("pareto_front: empty point set");
    std::vector<Point> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end(), [](const Point& a, const Point& b) {
        if (a.y_i != b.y_i) return a.y_i < b.y_i;
        return a.y_l < b.y_l;
    });
    ParetoFront front;
    double best_yl = std::numeric_limits<double>::infinity();
    for (const Point& p : sorted) {
        if (p.y_l < best_yl) {
            front.points.push_back(p);
            best_yl = p.y_l;
        }
    }
    return front;
}

Point reference_point(std::span<const MethodCell> cells) {
    if (cells.empty()) throw std::invalid_argument("reference_point: no cells");
    Point ref{-std::numeric_limits<double>::infinity(),
              -std::numeric_limits<double>::infinity()};
    for (const MethodCell& c : cells) {
        ref.y_l = std::max(ref.y_l, c.mean_yl + c.se_yl);
        ref.y_i = std::max(ref.y_i, c.mean_yi + c.se_yi);
    }
    return ref;
}

double hypervolume_2d(const ParetoFront& front, Point reference) {
    if (!(reference.y_l > 0.0) || !(reference.y_i > 0.0)) {
        throw ValidationError("hypervolume_2d: non-positive reference coordinate");
    }
    const double ref_u = std::log10(reference.y_i);
    const double ref_v = std::log10(reference.y_l);

    std::vector<std::pair<double, double>> pts;  // (log10 y_i, log10 y_l)
    pts.reserve(front.points.size());
    for (const Point& p : front.points) {
        const double yl = p.y_l <= 0.0 ? kYlFloor : p.y_l;
        if (!(p.y_i > 0.0)) {
            throw ValidationError("hypervolume_2d: non-positive epoch coordinate");
        }
        const double u = std::log10(p.y_i);
        const double v = std::log10(yl);
        if (u >= ref_u || v >= ref_v) continue;  // outside the box: zero contribution
        pts.emplace_back(u, v);
    }
    std::sort(pts.begin(), pts.end());

    double area = 0.0;
    double v_prev = ref_v;
    for (const auto& [u, v] : pts) {
        if (v < v_prev) {
            area += (ref_u - u) * (v_prev - v);
            v_prev = v;
        }
    }
    return area;
}

RelativeHvi relative_hvi(const std::map<std::string, std::vector<Point>>& per_method,
                         std::span<const MethodCell> cells) {
    if (per_method.empty()) throw std::invalid_argument("relative_hvi: no methods");
    const Point ref = reference_point(cells);

    std::vector<Point> all;
    for (const auto& [method, points] : per_method) {
        all.insert(all.end(), points.begin(), points.end());
    }
    RelativeHvi out;
    out.union_hypervolume = hypervolume_2d(pareto_front(all), ref);
    if (out.union_hypervolume == 0.0) {
        throw ValidationError("relative_hvi: the union front collapses onto the reference point");
    }
    for (const auto& [method, points] : per_method) {
        out.by_method[method] = hypervolume_2d(pareto_front(points), ref) / out.union_hypervolume;
    }
    return out;
}

std::map<std::string, double> average_rank(
    std::span<const std::map<std::string, double>> tables) {
    if (tables.empty()) throw std::invalid_argument("average_rank: no tables");
    const std::map<std::string, double>& first = tables.front();
    std::map<std::string, double> sums;
    for (const auto& [method, score] : first) sums[method] = 0.0;

    for (const auto& table : tables) {
        if (table.size() != sums.size()) {
            throw std::invalid_argument("average_rank: tables disagree on the method set");
        }
        std::vector<std::string> methods;
        std::vector<double> scores;
        for (const auto& [method, score] : table) {
            if (!sums.contains(method)) {
                throw std::invalid_argument("average_rank: tables disagree on the method set");
            }
            methods.push_back(method);
            scores.push_back(score);
        }
        const std::vector<double> ranks = average_ranks(scores, /*ascending=*/false);
        for (std::size_t i = 0; i < methods.size(); ++i) sums[methods[i]] += ranks[i];
    }
    for (auto& [method, sum] : sums) sum /= static_cast<double>(tables.size());
    return sums;
}

CurveRankExport curve_rank_export(const curves::Benchmark& benchmark, int sample_size,
                                  std::uint64_t seed) {
    const std::size_t n = benchmark.size();
    if (sample_size < 1 || static_cast<std::size_t>(sample_size) > n) {
        throw std::invalid_argument("curve_rank_export: sample_size must lie in [1, benchmark size]");
    }

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(idx);
    idx.resize(static_cast<std::size_t>(sample_size));

    // Rank the sampled curves by final validation error; ties break by
    // sample position for a deterministic integer rank.
    std::vector<std::size_t> by_final(idx.size());
    std::iota(by_final.begin(), by_final.end(), std::size_t{0});
    std::sort(by_final.begin(), by_final.end(), [&](std::size_t a, std::size_t b) {
        const double fa = benchmark.curves[idx[a]].valid_error.back();
        const double fb = benchmark.curves[idx[b]].valid_error.back();
        if (fa != fb) return fa < fb;
        return a < b;
    });
    std::vector<int> rank_of(idx.size());
    for (std::size_t pos = 0; pos < by_final.size(); ++pos) {
        rank_of[by_final[pos]] = static_cast<int>(pos) + 1;
    }

    CurveRankExport out;
    out.records.reserve(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        const curves::LearningCurve& c = benchmark.curves[idx[i]];
        out.records.push_back({c.candidate_id, rank_of[i], c.valid_error,
                               c.valid_error.back() > 1.0});
    }

    std::vector<double> first_epoch(n);
    std::vector<double> final_epoch(n);
    std::size_t worse = 0;
    for (std::size_t i = 0; i < n; ++i) {
        first_epoch[i] = benchmark.curves[i].valid_error.front();
        final_epoch[i] = benchmark.curves[i].valid_error.back();
        if (final_epoch[i] > 1.0) ++worse;
    }
    out.fraction_worse_than_constant = static_cast<double>(worse) / static_cast<double>(n);
    out.spearman_epoch1_final = spearman(first_epoch, final_epoch);
    return out;
}

} // namespace lcsim::moo
