// SPDX-License-Identifier: Apache-2.0
#include "lcsim/metrics.hpp"

#include <map>
#include <stdexcept>

#include "lcsim/errors.hpp"

namespace lcsim::metrics {

double r2_regression(std::span<const double> targets, std::span<const double> predictions) {
    if (targets.size() != predictions.size()) {
        throw std::invalid_argument("r2_regression: length mismatch");
    }
    if (targets.size() < 2) {
        throw std::invalid_argument("r2_regression: need at least 2 points");
    }
    double mean = 0.0;
    for (const double y : targets) mean += y;
    mean /= static_cast<double>(targets.size());

    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const double r = targets[i] - predictions[i];
        const double t = targets[i] - mean;
        ss_res += r * r;
        ss_tot += t * t;
    }
    return r2_from_square_sums(ss_res, ss_tot);
}

double r2_classification(std::span<const int> targets, std::span<const int> predictions,
                         bool* mode_tie) {
    if (targets.size() != predictions.size()) {
        throw std::invalid_argument("r2_classification: length mismatch");
    }
    if (targets.empty()) {
        throw std::invalid_argument("r2_classification: empty batch");
    }
    std::map<int, std::int64_t> counts;
    for (const int y : targets) ++counts[y];

    // Mode ties break toward the smallest label (the map's first maximal
    // entry); the tied labels share a count, so the metric value itself is
    // unaffected, only the reported tie flag.
    std::int64_t mode_count = 0;
    bool tie = false;
    for (const auto& [label, count] : counts) {
        if (count > mode_count) {
            mode_count = count;
            tie = false;
        } else if (count == mode_count) {
            tie = true;
        }
    }
    if (mode_tie) *mode_tie = tie;

    std::int64_t errors = 0;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        if (targets[i] != predictions[i]) ++errors;
    }
    const std::int64_t n = static_cast<std::int64_t>(targets.size());
    return r2_from_error_counts(errors, n - mode_count, n);
}

double r2_from_square_sums(double ss_res, double ss_tot) {
    if (ss_res < 0.0 || ss_tot < 0.0) {
        throw std::invalid_argument("r2_from_square_sums: negative sum of squares");
    }
    if (ss_tot == 0.0) {
        throw ValidationError("degenerate variance: all targets identical (SS_tot = 0)");
    }
    return 1.0 - ss_res / ss_tot;
}

double r2_from_error_counts(std::int64_t prediction_errors, std::int64_t mode_errors,
                            std::int64_t n) {
    if (n < 1 || prediction_errors < 0 || mode_errors < 0 || prediction_errors > n ||
        mode_errors > n) {
        throw std::invalid_argument("r2_from_error_counts: counts out of range");
    }
    if (mode_errors == 0) {
        throw ValidationError("degenerate labels: single-class targets (mode predictor is exact)");
    }
    return 1.0 - static_cast<double>(prediction_errors) / static_cast<double>(mode_errors);
}

} // namespace lcsim::metrics
