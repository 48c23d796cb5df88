// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace lcsim {

/// Decimal text that round-trips the exact double ("%.17g").
std::string fmt_g17(double v);

/// Compact display form for policy parameters ("%.6g").
std::string fmt_param(double v);

/// FNV-1a 64-bit hash.
std::uint64_t fnv1a64(std::string_view s);
std::uint64_t fnv1a64(std::string_view s, std::uint64_t state);

std::string hex64(std::uint64_t v);

/// Replaces anything outside [A-Za-z0-9._-] with '_'.
std::string sanitize_filename(std::string_view s);

std::vector<std::string> split(std::string_view line, char delim);

double parse_double(std::string_view s);     // throws ParseError
std::int64_t parse_int(std::string_view s);  // throws ParseError

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;  // standard error of the mean; 0 when n < 2
    int n = 0;
};

MeanSe mean_se(std::span<const double> xs);

/// Average ranks, 1-based; ties share the mean of their positions.
/// ascending = true ranks the smallest value 1.
std::vector<double> average_ranks(std::span<const double> xs, bool ascending);

/// Spearman rank correlation (average ranks on ties).
double spearman(std::span<const double> x, std::span<const double> y);

} // namespace lcsim
