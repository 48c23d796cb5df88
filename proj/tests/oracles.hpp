// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent reference implementations used to cross-check the library:
// explicit loops, exhaustive subset sums, and raster counting. Nothing here
// shares code with the implementations under test.

#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>

#include "lcsim/moo.hpp"

namespace oracles {

inline double r2_regression(const std::vector<double>& y, const std::vector<double>& yhat) {
    double mean = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) mean += y[i];
    mean /= static_cast<double>(y.size());
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
        ss_tot += (y[i] - mean) * (y[i] - mean);
    }
    return 1.0 - ss_res / ss_tot;
}

inline double r2_classification(const std::vector<int>& y, const std::vector<int>& yhat) {
    int mode = y[0];
    std::size_t mode_count = 0;
    for (const int candidate : y) {
        std::size_t count = 0;
        for (const int v : y) {
            if (v == candidate) ++count;
        }
        if (count > mode_count || (count == mode_count && candidate < mode)) {
            mode = candidate;
            mode_count = count;
        }
    }
    double pred_loss = 0.0;
    double mode_loss = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] != yhat[i]) pred_loss += 1.0;
        if (y[i] != mode) mode_loss += 1.0;
    }
    pred_loss /= static_cast<double>(y.size());
    mode_loss /= static_cast<double>(y.size());
    return 1.0 - pred_loss / mode_loss;
}

/// O(n^2) pairwise-dominance filter.
inline std::set<std::pair<double, double>> pareto_front(
    const std::vector<lcsim::moo::Point>& points) {
    std::set<std::pair<double, double>> front;
    for (const auto& p : points) {
        bool dominated = false;
        for (const auto& q : points) {
            if (q.y_l <= p.y_l && q.y_i <= p.y_i && (q.y_l < p.y_l || q.y_i < p.y_i)) {
                dominated = true;
                break;
            }
        }
        if (!dominated) front.insert({p.y_i, p.y_l});
    }
    return front;
}

/// Exact union-of-rectangles area by inclusion-exclusion over all subsets,
/// in log10 space, with the same clipping rules as the implementation.
inline double hypervolume_inclusion_exclusion(const std::vector<lcsim::moo::Point>& points,
                                              lcsim::moo::Point ref) {
    const double U = std::log10(ref.y_i);
    const double V = std::log10(ref.y_l);
    std::vector<std::pair<double, double>> rects;
    for (const auto& p : points) {
        const double u = std::log10(p.y_i);
        const double v = std::log10(std::max(p.y_l, 1e-12));
        if (u >= U || v >= V) continue;
        rects.emplace_back(u, v);
    }
    const std::size_t n = rects.size();
    double area = 0.0;
    for (std::size_t mask = 1; mask < (std::size_t{1} << n); ++mask) {
        double max_u = -1e300;
        double max_v = -1e300;
        int bits = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (mask & (std::size_t{1} << i)) {
                ++bits;
                max_u = std::max(max_u, rects[i].first);
                max_v = std::max(max_v, rects[i].second);
            }
        }
        const double w = U - max_u;
        const double h = V - max_v;
        if (w > 0.0 && h > 0.0) area += (bits % 2 == 1 ? 1.0 : -1.0) * w * h;
    }
    return area;
}

/// Center-sampling raster over the bounding box of the transformed points.
inline double hypervolume_raster(const std::vector<lcsim::moo::Point>& points,
                                 lcsim::moo::Point ref, int resolution) {
    const double U = std::log10(ref.y_i);
    const double V = std::log10(ref.y_l);
    std::vector<std::pair<double, double>> pts;
    for (const auto& p : points) {
        const double u = std::log10(p.y_i);
        const double v = std::log10(std::max(p.y_l, 1e-12));
        if (u >= U || v >= V) continue;
        pts.emplace_back(u, v);
    }
    if (pts.empty()) return 0.0;
    double u0 = 1e300;
    double v0 = 1e300;
    for (const auto& [u, v] : pts) {
        u0 = std::min(u0, u);
        v0 = std::min(v0, v);
    }
    const double cell_w = (U - u0) / resolution;
    const double cell_h = (V - v0) / resolution;
    std::sort(pts.begin(), pts.end());  // ascending u
    double area = 0.0;
    std::size_t next = 0;
    double v_min = 1e300;
    for (int col = 0; col < resolution; ++col) {
        const double cu = u0 + (col + 0.5) * cell_w;
        while (next < pts.size() && pts[next].first <= cu) {
            v_min = std::min(v_min, pts[next].second);
            ++next;
        }
        if (v_min > V) continue;
        int covered = 0;
        for (int row = 0; row < resolution; ++row) {
            const double cv = v0 + (row + 0.5) * cell_h;
            if (cv >= v_min) ++covered;
        }
        area += cell_w * cell_h * covered;
    }
    return area;
}

} // namespace oracles
