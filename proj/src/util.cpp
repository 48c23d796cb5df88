// SPDX-License-Identifier: Apache-2.0
#include "lcsim/util.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numeric>

#include "lcsim/errors.hpp"

namespace lcsim {

std::string fmt_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_param(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::uint64_t fnv1a64(std::string_view s, std::uint64_t state) {
    for (const char c : s) {
        state ^= static_cast<unsigned char>(c);
        state *= 0x100000001b3ULL;
    }
    return state;
}

std::uint64_t fnv1a64(std::string_view s) { return fnv1a64(s, 0xcbf29ce484222325ULL); }

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string sanitize_filename(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
        out.push_back(ok ? c : '_');
    }
    return out;
}

std::vector<std::string> split(std::string_view line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view s) {
    const std::string tmp(s);
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(tmp.c_str(), &end);
    if (end == tmp.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("not a number: '" + tmp + "'");
    }
    return v;
}

std::int64_t parse_int(std::string_view s) {
    const std::string tmp(s);
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(tmp.c_str(), &end, 10);
    if (end == tmp.c_str() || *end != '\0' || errno == ERANGE) {
        throw ParseError("not an integer: '" + tmp + "'");
    }
    return v;
}

MeanSe mean_se(std::span<const double> xs) {
    MeanSe r;
    r.n = static_cast<int>(xs.size());
    if (r.n == 0) return r;
    r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(r.n);
    if (r.n < 2) return r;
    double ss = 0.0;
    for (const double x : xs) {
        const double d = x - r.mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(r.n - 1);
    r.se = std::sqrt(var / static_cast<double>(r.n));
    return r;
}

std::vector<double> average_ranks(std::span<const double> xs, bool ascending) {
    const std::size_t n = xs.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        return ascending ? xs[i] < xs[j] : xs[i] > xs[j];
    });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
        // positions i..j (0-based) share the mean of 1-based positions
        const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

double spearman(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("spearman: need two equal-length series of size >= 2");
    }
    const std::vector<double> rx = average_ranks(x, true);
    const std::vector<double> ry = average_ranks(y, true);
    const double n = static_cast<double>(x.size());
    const double mean = (n + 1.0) / 2.0;
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) {
        throw ValidationError("spearman: a series has no rank variation");
    }
    if (rx == ry) return 1.0;
    return sxy / std::sqrt(sxx * syy);
}

} // namespace lcsim
