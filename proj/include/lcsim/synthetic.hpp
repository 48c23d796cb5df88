// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include "lcsim/curve_store.hpp"

namespace lcsim::curves {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(const Range&) const = default;
};

/// Parameters for desk-scale benchmark generation. Curves follow a
/// saturating four-parameter mean (see lce::mmf4_eval) whose epoch-1 and
/// epoch-i_max values are drawn from a_range and c_range; b_range and
/// d_range shape the transition. Per-epoch Gaussian noise grows with a
/// curve's final-error rank, so bad curves oscillate more than good ones.
struct SyntheticSpec {
    int n_curves = 0;
    int i_max = 0;
    Range a_range{0.8, 1.2};        // epoch-1 validation error pool
    Range b_range{1.0, 20.0};       // transition scale, log-uniform, > 0
    Range c_range{0.02, 0.9};       // final validation error pool (converging curves)
    Range d_range{0.7, 2.0};        // transition rate, > 0
    Range noise_range{0.0, 0.02};   // per-curve noise scale, best -> worst
    double fraction_diverging = 0.0;  // share of curves ending worse than the constant predictor
    double rank_stability = 1.0;      // 1: epoch-1 ranking equals final ranking; 0: unrelated
    std::uint64_t seed = 0;
    std::string name = "synthetic";
    TaskKind task_kind = TaskKind::Classification;

    void validate() const;  // throws ValidationError
    std::string canonical_string() const;
};

/// Deterministic function of the spec: identical specs produce bit-identical
/// benchmarks. Validation and test curves share the parametric mean and
/// differ by independent noise.
Benchmark generate_synthetic(const SyntheticSpec& spec);

} // namespace lcsim::curves
