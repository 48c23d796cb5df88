// SPDX-License-Identifier: Apache-2.0
#include "lcsim/curve_store.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "lcsim/errors.hpp"
#include "lcsim/metrics.hpp"
#include "lcsim/util.hpp"

namespace lcsim::curves {

namespace {

constexpr std::string_view kCanonicalHeader = "candidate_id,epoch,train_error,valid_error,test_error";
constexpr std::string_view kR2Header = "candidate_id,epoch,train_r2,valid_r2,test_r2";

std::string_view expected_header(CurveSchema schema) {
    return schema == CurveSchema::Canonical ? kCanonicalHeader : kR2Header;
}

struct RawCandidate {
    std::string id;
    // epoch -> (train, valid, test); map catches duplicates and gaps
    std::map<int, std::array<double, 3>> rows;
    bool malformed = false;
};

void require_no_delimiter(std::string_view value, std::string_view what) {
    if (value.find(',') != std::string_view::npos ||
        value.find('\n') != std::string_view::npos) {
        throw ValidationError(std::string(what) + " must not contain ',' or newline: '" +
                              std::string(value) + "'");
    }
}

} // namespace

std::string_view to_string(TaskKind kind) {
    return kind == TaskKind::Regression ? "regression" : "classification";
}

TaskKind task_kind_from_string(std::string_view s) {
    if (s == "regression") return TaskKind::Regression;
    if (s == "classification") return TaskKind::Classification;
    throw ConfigError("unknown task kind: '" + std::string(s) + "'");
}

CurveSchema schema_from_string(std::string_view s) {
    if (s == "canonical") return CurveSchema::Canonical;
    if (s == "r2") return CurveSchema::R2;
    throw ConfigError("unknown curve schema: '" + std::string(s) + "'");
}

std::string_view to_string(CurveSchema s) {
    return s == CurveSchema::Canonical ? "canonical" : "r2";
}

std::string FilterReport::to_string() const {
    std::ostringstream os;
    os << "filter report: records_read=" << records_read
       << " candidates_seen=" << candidates_seen << " kept=" << kept
       << " dropped=" << dropped() << " (non_finite=" << dropped_non_finite
       << " short=" << dropped_short << " malformed=" << dropped_malformed << ")";
    for (const auto& w : warnings) os << "\nwarning: " << w;
    return os.str();
}

Benchmark load_benchmark(const std::filesystem::path& path, CurveSchema schema,
                         const LoadOptions& options, FilterReport* report) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path.string() + "'");

    FilterReport local;
    FilterReport& rep = report ? *report : local;
    rep = FilterReport{};

    std::optional<std::string> meta_name;
    std::optional<std::string> meta_task;
    std::optional<std::string> meta_provenance;

    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;

    std::vector<RawCandidate> order;
    std::map<std::string, std::size_t> index;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::string_view body(line);
            body.remove_prefix(1);
            while (!body.empty() && body.front() == ' ') body.remove_prefix(1);
            const std::size_t eq = body.find('=');
            if (eq != std::string_view::npos) {
                const std::string_view key = body.substr(0, eq);
                const std::string value(body.substr(eq + 1));
                if (key == "name") meta_name = value;
                else if (key == "task") meta_task = value;
                else if (key == "provenance") meta_provenance = value;
            }
            continue;
        }
        if (!header_seen) {
            if (line != expected_header(schema)) {
                throw ValidationError("schema mismatch in '" + path.string() + "': expected header '" +
                                      std::string(expected_header(schema)) + "', found '" + line + "'");
            }
            header_seen = true;
            continue;
        }

        const std::vector<std::string> cols = split(line, ',');
        if (cols.size() != 5) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 5 columns, found " + std::to_string(cols.size()));
        }
        int epoch = 0;
        std::array<double, 3> vals{};
        try {
            epoch = static_cast<int>(parse_int(cols[1]));
            for (int k = 0; k < 3; ++k) vals[static_cast<std::size_t>(k)] = parse_double(cols[2 + k]);
        } catch (const ParseError& e) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
        if (epoch < 1) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": epoch must be >= 1");
        }
        ++rep.records_read;

        auto [it, inserted] = index.try_emplace(cols[0], order.size());
        if (inserted) order.push_back(RawCandidate{cols[0], {}, false});
        RawCandidate& cand = order[it->second];
        if (!cand.rows.emplace(epoch, vals).second) cand.malformed = true;  // duplicate epoch
    }

    if (!header_seen) {
        throw ValidationError("empty benchmark: '" + path.string() + "' has no header row");
    }

    rep.candidates_seen = static_cast<std::int64_t>(order.size());
    if (order.empty()) {
        throw ValidationError("empty benchmark: '" + path.string() + "' has no records");
    }

    int i_max = 0;
    for (const RawCandidate& c : order) {
        if (!c.rows.empty()) i_max = std::max(i_max, c.rows.rbegin()->first);
    }

    Benchmark bench;
    bench.i_max = i_max;
    for (RawCandidate& c : order) {
        if (c.malformed) {
            ++rep.dropped_malformed;
            continue;
        }
        if (static_cast<int>(c.rows.size()) != i_max || c.rows.begin()->first != 1 ||
            c.rows.rbegin()->first != i_max) {
            ++rep.dropped_short;  // curves shorter than i_max are rejected, not padded
            continue;
        }
        LearningCurve curve;
        curve.candidate_id = std::move(c.id);
        curve.train_error.reserve(static_cast<std::size_t>(i_max));
        curve.valid_error.reserve(static_cast<std::size_t>(i_max));
        curve.test_error.reserve(static_cast<std::size_t>(i_max));
        bool finite = true;
        for (const auto& [epoch, vals] : c.rows) {
            for (int k = 0; k < 3; ++k) {
                double v = vals[static_cast<std::size_t>(k)];
                if (schema == CurveSchema::R2) v = metrics::to_generalization_error(v).value;
                if (!std::isfinite(v)) finite = false;
                if (k == 0) curve.train_error.push_back(v);
                else if (k == 1) curve.valid_error.push_back(v);
                else curve.test_error.push_back(v);
            }
        }
        if (!finite) {
            ++rep.dropped_non_finite;
            continue;
        }
        bench.curves.push_back(std::move(curve));
    }
    rep.kept = static_cast<std::int64_t>(bench.curves.size());
    if (bench.curves.empty()) {
        throw ValidationError("empty benchmark: all " + std::to_string(order.size()) +
                              " candidates in '" + path.string() + "' were filtered out");
    }

    bench.name = meta_name ? *meta_name : (options.name ? *options.name : path.stem().string());
    if (meta_task) {
        bench.task_kind = task_kind_from_string(*meta_task);
    } else if (options.task_kind) {
        bench.task_kind = *options.task_kind;
    } else {
        throw ValidationError("'" + path.string() +
                              "' carries no task metadata; pass the task kind explicitly");
    }
    bench.provenance = meta_provenance ? *meta_provenance : path.string();

    if (bench.curves.size() < 200) {
        rep.warnings.push_back("benchmark has " + std::to_string(bench.curves.size()) +
                               " curves; runs requesting more iterations sample without "
                               "replacement up to exhaustion");
    }
    return bench;
}

void canonical_export(const Benchmark& benchmark, const std::filesystem::path& path) {
    if (benchmark.curves.empty()) {
        throw ValidationError("cannot export an empty benchmark");
    }
    require_no_delimiter(benchmark.name, "benchmark name");
    require_no_delimiter(benchmark.provenance, "benchmark provenance");
    for (const LearningCurve& c : benchmark.curves) {
        require_no_delimiter(c.candidate_id, "candidate id");
        if (c.epochs() != benchmark.i_max ||
            c.train_error.size() != c.valid_error.size() ||
            c.test_error.size() != c.valid_error.size()) {
            throw ValidationError("candidate '" + c.candidate_id + "' is not fully tabulated to i_max");
        }
    }

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << "# name=" << benchmark.name << "\n";
    out << "# task=" << to_string(benchmark.task_kind) << "\n";
    out << "# provenance=" << benchmark.provenance << "\n";
    out << kCanonicalHeader << "\n";
    for (const LearningCurve& c : benchmark.curves) {
        for (int e = 1; e <= benchmark.i_max; ++e) {
            const std::size_t i = static_cast<std::size_t>(e - 1);
            out << c.candidate_id << ',' << e << ',' << fmt_g17(c.train_error[i]) << ','
                << fmt_g17(c.valid_error[i]) << ',' << fmt_g17(c.test_error[i]) << "\n";
        }
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

double worse_than_constant_fraction(const Benchmark& benchmark) {
    if (benchmark.curves.empty()) return 0.0;
    std::size_t n = 0;
    for (const LearningCurve& c : benchmark.curves) {
        if (!c.valid_error.empty() && c.valid_error.back() > 1.0) ++n;
    }
    return static_cast<double>(n) / static_cast<double>(benchmark.curves.size());
}

} // namespace lcsim::curves
