// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>

namespace lcsim::metrics {

/// Model quality on the 1 - R^2 scale; lower is better. 0 is a perfect
/// predictor, 1 matches the optimal constant predictor, and values above 1
/// are worse than the constant predictor.
struct GeneralizationError {
    double value = 0.0;
};

inline GeneralizationError to_generalization_error(double r2) { return {1.0 - r2}; }

/// Coefficient of determination, 1 - SS_res / SS_tot, with the empirical
/// mean of the targets as baseline. Requires at least two points and
/// non-constant targets (throws ValidationError on zero total variance).
double r2_regression(std::span<const double> targets, std::span<const double> predictions);

/// R^2 generalized to classification: one minus the ratio of the mean 0-1
/// loss of the predictions to the mean 0-1 loss of the marginal-mode
/// predictor. Mode ties break toward the smallest label; `mode_tie`, when
/// non-null, reports whether a tie occurred. Throws ValidationError when
/// the targets are a single class (the mode predictor has zero loss).
double r2_classification(std::span<const int> targets, std::span<const int> predictions,
                         bool* mode_tie = nullptr);

// Aggregate entry points for benchmark files that ship loss sums instead
// of raw predictions.
double r2_from_square_sums(double ss_res, double ss_tot);
double r2_from_error_counts(std::int64_t prediction_errors, std::int64_t mode_errors,
                            std::int64_t n);

} // namespace lcsim::metrics
