// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

namespace lcsim::lce {

/// Four-parameter saturating curve f(x) = (a*b + c*x^d) / (b + x^d).
/// a is the initial-performance asymptote, c the horizon asymptote,
/// b > 0 and d shape the transition.
struct Mmf4Params {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double d = 1.0;

    bool operator==(const Mmf4Params&) const = default;
};

/// Evaluates the curve at epoch x >= 1. Computed as c + (a - c) * b / (b + x^d),
/// which saturates to the horizon asymptote c when x^d overflows instead of
/// producing inf/inf.
inline double mmf4_eval(const Mmf4Params& p, double x) {
    const double t = std::pow(x, p.d);
    if (!std::isfinite(t)) return p.c;
    const double w = p.b / (p.b + t);
    return p.c + (p.a - p.c) * w;
}

/// One observed point of a learning curve.
struct Anchor {
    double epoch = 0.0;
    double error = 0.0;
};

} // namespace lcsim::lce
