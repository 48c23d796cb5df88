// SPDX-License-Identifier: Apache-2.0
#include "lcsim/lce_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lcsim/rng.hpp"

namespace lcsim::lce {

namespace {

// Internal coordinates: theta = (a, log b, c, d).
using Vec4 = std::array<double, 4>;

Mmf4Params to_params(const Vec4& th) { return {th[0], std::exp(th[1]), th[2], th[3]}; }

double sse_at(const Vec4& th, std::span<const Anchor> prefix) {
    const Mmf4Params p = to_params(th);
    double acc = 0.0;
    for (const Anchor& a : prefix) {
        const double r = mmf4_eval(p, a.epoch) - a.error;
        acc += r * r;
    }
    return acc;
}

/// Solves a 4x4 linear system by Gaussian elimination with partial
/// pivoting. Returns false on a (numerically) singular matrix.
bool solve4(std::array<Vec4, 4> m, Vec4 rhs, Vec4& out) {
    for (int col = 0; col < 4; ++col) {
        int pivot = col;
        for (int row = col + 1; row < 4; ++row) {
            if (std::fabs(m[row][col]) > std::fabs(m[pivot][col])) pivot = row;
        }
        if (std::fabs(m[pivot][col]) < 1e-300) return false;
        std::swap(m[col], m[pivot]);
        std::swap(rhs[col], rhs[pivot]);
        for (int row = col + 1; row < 4; ++row) {
            const double f = m[row][col] / m[col][col];
            for (int k = col; k < 4; ++k) m[row][k] -= f * m[col][k];
            rhs[row] -= f * rhs[col];
        }
    }
    for (int row = 3; row >= 0; --row) {
        double v = rhs[row];
        for (int k = row + 1; k < 4; ++k) v -= m[row][k] * out[k];
        out[row] = v / m[row][row];
    }
    for (const double v : out) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

struct DescentResult {
    Vec4 theta;
    double sse;
    bool converged;
};

DescentResult descend(Vec4 theta, std::span<const Anchor> prefix, const FitConfig& cfg) {
    const std::size_t n = prefix.size();
    double sse = sse_at(theta, prefix);
    if (!std::isfinite(sse)) return {theta, std::numeric_limits<double>::infinity(), false};

    double lambda = 1e-3;
    bool converged = sse == 0.0;

    std::vector<double> resid(n);
    std::vector<Vec4> jac(n);

    for (int iter = 0; iter < cfg.max_iterations && !converged; ++iter) {
        const Mmf4Params p = to_params(theta);
        for (std::size_t j = 0; j < n; ++j) {
            const double x = prefix[j].epoch;
            const double t = std::pow(x, p.d);
            double w;
            double dw_dd;
            if (!std::isfinite(t)) {
                w = 0.0;
                dw_dd = 0.0;
            } else {
                w = p.b / (p.b + t);
                dw_dd = -w * (1.0 - w) * std::log(x);
            }
            const double f = p.c + (p.a - p.c) * w;
            resid[j] = f - prefix[j].error;
            jac[j][0] = w;                              // d f / d a
            jac[j][1] = (p.a - p.c) * w * (1.0 - w);    // d f / d log b
            jac[j][2] = 1.0 - w;                        // d f / d c
            jac[j][3] = (p.a - p.c) * dw_dd;            // d f / d d
        }

        std::array<Vec4, 4> jtj{};
        Vec4 jtr{};
        for (std::size_t j = 0; j < n; ++j) {
            for (int r = 0; r < 4; ++r) {
                jtr[r] += jac[j][r] * resid[j];
                for (int c = r; c < 4; ++c) jtj[r][c] += jac[j][r] * jac[j][c];
            }
        }
        for (int r = 1; r < 4; ++r) {
            for (int c = 0; c < r; ++c) jtj[r][c] = jtj[c][r];
        }

        double gnorm = 0.0;
        for (const double g : jtr) gnorm = std::max(gnorm, std::fabs(g));
        if (gnorm <= cfg.gradient_tol * std::max(1.0, sse)) {
            converged = true;
            break;
        }

        bool stepped = false;
        while (lambda <= 1e12) {
            std::array<Vec4, 4> damped = jtj;
            for (int r = 0; r < 4; ++r) damped[r][r] += lambda * std::max(jtj[r][r], 1e-12);
            Vec4 neg_g{};
            for (int r = 0; r < 4; ++r) neg_g[r] = -jtr[r];
            Vec4 step{};
            if (solve4(damped, neg_g, step)) {
                Vec4 trial = theta;
                for (int r = 0; r < 4; ++r) trial[r] += step[r];
                const double trial_sse = sse_at(trial, prefix);
                if (std::isfinite(trial_sse) && trial_sse < sse) {
                    double snorm = 0.0;
                    double tnorm = 0.0;
                    for (int r = 0; r < 4; ++r) {
                        snorm = std::max(snorm, std::fabs(step[r]));
                        tnorm = std::max(tnorm, std::fabs(theta[r]));
                    }
                    theta = trial;
                    sse = trial_sse;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    stepped = true;
                    if (snorm <= cfg.step_tol * (1.0 + tnorm) || sse == 0.0) converged = true;
                    break;
                }
            }
            lambda *= 4.0;
        }
        if (!stepped) break;  // diverged: no acceptable step at any damping
    }
    return {theta, sse, converged};
}

} // namespace

FitResult heuristic_fit(std::span<const Anchor> prefix) {
    if (prefix.size() < 4) {
        throw std::invalid_argument("heuristic_fit: need at least 4 anchors");
    }
    const Vec4 init{prefix.front().error, 0.0, prefix.back().error, 1.0};
    FitResult out;
    out.params = to_params(init);
    out.sse = sse_at(init, prefix);
    out.converged = false;
    out.restarts_used = 0;
    return out;
}

FitResult fit_lm(std::span<const Anchor> prefix, const FitConfig& config) {
    if (prefix.size() < 4) {
        throw std::invalid_argument("fit_lm: need at least 4 anchors for 4 free parameters");
    }

    const double first = prefix.front().error;
    const double last = prefix.back().error;

    std::vector<Vec4> inits;
    inits.push_back({first, 0.0, last, 1.0});  // heuristic: a = first, c = last, b = d = 1

    Rng rng(config.seed);
    for (int k = 0; k < config.restarts; ++k) {
        const double b = rng.log_uniform(0.1, 100.0);
        const double d = rng.log_uniform(0.25, 4.0);
        const double a = first * (1.0 + 0.2 * rng.uniform(-1.0, 1.0));
        const double c = last * (1.0 + 0.2 * rng.uniform(-1.0, 1.0));
        inits.push_back({a, std::log(b), c, d});
    }

    FitResult best;
    int evaluated = 0;
    for (const Vec4& init : inits) {
        ++evaluated;
        const DescentResult r = descend(init, prefix, config);
        if (r.sse < best.sse) {
            best.params = to_params(r.theta);
            best.sse = r.sse;
            best.converged = r.converged;
        }
        if (best.sse <= 1e-24) break;
    }
    best.restarts_used = evaluated - 1;  // random restarts beyond the heuristic
    if (!std::isfinite(best.sse)) {
        // Every initialization produced a non-finite surface; fall back to
        // the heuristic so callers always get usable parameters.
        best.params = to_params(inits.front());
        best.sse = sse_at(inits.front(), prefix);
        best.converged = false;
    }
    return best;
}

} // namespace lcsim::lce
