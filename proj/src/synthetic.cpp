// SPDX-License-Identifier: Apache-2.0
#include "lcsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "lcsim/errors.hpp"
#include "lcsim/mmf4.hpp"
#include "lcsim/rng.hpp"
#include "lcsim/util.hpp"

namespace lcsim::curves {

namespace {

constexpr double kErrorFloor = 1e-6;

void require_range(const Range& r, std::string_view what, bool positive) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi)) {
        throw ValidationError("invalid range for " + std::string(what));
    }
    if (positive && !(r.lo > 0.0)) {
        throw ValidationError(std::string(what) + " range must be positive");
    }
}

std::vector<std::size_t> argsort(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    return order;
}

} // namespace

void SyntheticSpec::validate() const {
    if (n_curves < 1) throw ValidationError("n_curves must be >= 1");
    if (i_max < 2) throw ValidationError("i_max must be >= 2");
    require_range(a_range, "a", false);
    require_range(b_range, "b", true);
    require_range(c_range, "c", false);
    require_range(d_range, "d", true);
    require_range(noise_range, "noise", false);
    if (noise_range.lo < 0.0) throw ValidationError("noise range must be non-negative");
    if (fraction_diverging < 0.0 || fraction_diverging > 1.0) {
        throw ValidationError("fraction_diverging must lie in [0, 1]");
    }
    if (rank_stability < 0.0 || rank_stability > 1.0) {
        throw ValidationError("rank_stability must lie in [0, 1]");
    }
}

std::string SyntheticSpec::canonical_string() const {
    std::ostringstream os;
    os << "n=" << n_curves << ";imax=" << i_max << ";a=" << fmt_g17(a_range.lo) << ","
       << fmt_g17(a_range.hi) << ";b=" << fmt_g17(b_range.lo) << "," << fmt_g17(b_range.hi)
       << ";c=" << fmt_g17(c_range.lo) << "," << fmt_g17(c_range.hi) << ";d="
       << fmt_g17(d_range.lo) << "," << fmt_g17(d_range.hi) << ";noise="
       << fmt_g17(noise_range.lo) << "," << fmt_g17(noise_range.hi) << ";div="
       << fmt_g17(fraction_diverging) << ";stab=" << fmt_g17(rank_stability) << ";seed=" << seed
       << ";name=" << name << ";task=" << to_string(task_kind);
    return os.str();
}

Benchmark generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    const std::size_t n = static_cast<std::size_t>(spec.n_curves);
    const double horizon = static_cast<double>(spec.i_max);

    // Final values: converging curves draw from c_range, diverging curves
    // land above the constant-predictor line (error > 1).
    const double div_lo = 1.05;
    const double div_hi = div_lo + std::max(spec.c_range.hi - spec.c_range.lo, 0.5);
    std::vector<double> finals(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool diverging = rng.uniform01() < spec.fraction_diverging;
        finals[i] = diverging ? rng.uniform(div_lo, div_hi)
                              : rng.uniform(spec.c_range.lo, spec.c_range.hi);
    }

    // Epoch-1 values: a sorted pool assigned by a blend of the final-error
    // order and a random order, so rank_stability = 1 reproduces the final
    // ranking at epoch 1 exactly and rank_stability = 0 decouples them.
    std::vector<double> start_pool(n);
    for (std::size_t i = 0; i < n; ++i) {
        start_pool[i] = rng.uniform(spec.a_range.lo, spec.a_range.hi);
    }
    std::sort(start_pool.begin(), start_pool.end());

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);

    const std::vector<std::size_t> final_order = argsort(finals);
    std::vector<double> final_rank(n);  // 0-based rank, 0 = best final error
    for (std::size_t pos = 0; pos < n; ++pos) {
        final_rank[final_order[pos]] = static_cast<double>(pos);
    }

    std::vector<double> blend(n);
    for (std::size_t i = 0; i < n; ++i) {
        blend[i] = spec.rank_stability * final_rank[i] +
                   (1.0 - spec.rank_stability) * static_cast<double>(perm[i]);
    }
    const std::vector<std::size_t> blend_order = argsort(blend);
    std::vector<double> starts(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        starts[blend_order[pos]] = start_pool[pos];
    }

    Benchmark bench;
    bench.name = spec.name;
    bench.task_kind = spec.task_kind;
    bench.i_max = spec.i_max;
    bench.provenance = "generator:" + hex64(fnv1a64(spec.canonical_string()));
    bench.curves.reserve(n);

    const int id_width = static_cast<int>(std::to_string(spec.n_curves - 1).size());
    for (std::size_t i = 0; i < n; ++i) {
        const double b = rng.log_uniform(spec.b_range.lo, spec.b_range.hi);
        const double d = rng.uniform(spec.d_range.lo, spec.d_range.hi);

        // Solve the two asymptotes so the mean passes exactly through the
        // drawn epoch-1 and epoch-i_max values. The mean is linear in (a, c)
        // given (b, d): f(x) = c + (a - c) * b / (b + x^d).
        const double w1 = b / (b + 1.0);
        const double wm = b / (b + std::pow(horizon, d));
        const double delta = (starts[i] - finals[i]) / (w1 - wm);
        const double c = starts[i] - delta * w1;
        const double a = c + delta;
        const lce::Mmf4Params params{a, b, c, d};

        // Worse-final curves oscillate more; the rank fraction scales the
        // per-curve noise inside the requested range.
        const double frac = n > 1 ? final_rank[i] / static_cast<double>(n - 1) : 0.0;
        const double sigma = spec.noise_range.lo + (spec.noise_range.hi - spec.noise_range.lo) * frac;

        LearningCurve curve;
        {
            std::ostringstream id;
            id << "c";
            const std::string digits = std::to_string(i);
            id << std::string(static_cast<std::size_t>(std::max(0, id_width - static_cast<int>(digits.size()))), '0')
               << digits;
            curve.candidate_id = id.str();
        }
        curve.train_error.reserve(static_cast<std::size_t>(spec.i_max));
        curve.valid_error.reserve(static_cast<std::size_t>(spec.i_max));
        curve.test_error.reserve(static_cast<std::size_t>(spec.i_max));
        for (int e = 1; e <= spec.i_max; ++e) {
            const double mean = lce::mmf4_eval(params, static_cast<double>(e));
            const double valid = mean + sigma * rng.normal01();
            const double test = mean + sigma * rng.normal01();
            const double train = 0.85 * mean + 0.5 * sigma * rng.normal01();
            curve.valid_error.push_back(std::max(valid, kErrorFloor));
            curve.test_error.push_back(std::max(test, kErrorFloor));
            curve.train_error.push_back(std::max(train, kErrorFloor));
        }
        bench.curves.push_back(std::move(curve));
    }
    return bench;
}

} // namespace lcsim::curves
