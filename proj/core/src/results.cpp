#include "albench/results.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <stdexcept>
#include <tuple>

namespace albench {

namespace {

auto key_of(const ResultRow& r) {
    return std::tie(r.dataset, r.pipeline, r.strategy, r.b, r.s, r.trial, r.iteration);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

template <typename T>
T parse_int(const std::string& s) {
    T v{};
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("results: bad integer field '" + s + "'");
    }
    return v;
}

double parse_real(const std::string& s) {
    if (s == "nan") return std::nan("");
    double v = 0.0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
        throw std::runtime_error("results: bad real field '" + s + "'");
    }
    return v;
}

}  // namespace

void ResultsTable::sort_canonical() {
    std::sort(rows.begin(), rows.end(),
              [](const ResultRow& a, const ResultRow& b) { return key_of(a) < key_of(b); });
}

void ResultsTable::check_primary_key() const {
    std::set<std::tuple<std::string, std::string, std::string, std::size_t, std::size_t, int, int>> seen;
    for (const auto& r : rows) {
        if (!seen.emplace(r.dataset, r.pipeline, r.strategy, r.b, r.s, r.trial, r.iteration)
                 .second) {
            throw std::runtime_error("results: duplicate primary key for dataset=" + r.dataset +
                                     " pipeline=" + r.pipeline + " strategy=" + r.strategy);
        }
    }
}

std::string result_csv_header(bool include_timing) {
    std::string h = "dataset,pipeline,strategy,b,s,trial,iteration,n,f1_macro,hyperparams,flags,seed";
    if (include_timing) h += ",wall_ms";
    return h;
}

std::string format_result_row(const ResultRow& row, bool include_timing) {
    char num[48];
    std::string out;
    out += row.dataset;
    out += ',';
    out += row.pipeline;
    out += ',';
    out += row.strategy;
    out += ',';
    out += std::to_string(row.b);
    out += ',';
    out += std::to_string(row.s);
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    out += std::to_string(row.iteration);
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    if (std::isnan(row.f1)) {
        out += "nan";
    } else {
        std::snprintf(num, sizeof(num), "%.10g", row.f1);
        out += num;
    }
    out += ',';
    out += row.hyperparams;
    out += ',';
    out += row.flags;
    out += ',';
    out += std::to_string(row.seed);
    if (include_timing) {
        std::snprintf(num, sizeof(num), "%.3f", row.wall_ms);
        out += ',';
        out += num;
    }
    return out;
}

std::string ResultsTable::to_csv(bool include_timing) const {
    std::string out = result_csv_header(include_timing);
    out += '\n';
    for (const auto& row : rows) {
        out += format_result_row(row, include_timing);
        out += '\n';
    }
    return out;
}

ResultsTable ResultsTable::from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("results: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("results: empty file " + path);
    bool has_timing = true;
    {
        const auto fields = split_fields(line);
        if (fields == split_fields(result_csv_header(true))) {
            has_timing = true;
        } else if (fields == split_fields(result_csv_header(false))) {
            has_timing = false;
        } else {
            throw std::runtime_error("results: unexpected header in " + path);
        }
    }

    ResultsTable table;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = split_fields(line);
        const std::size_t expected = has_timing ? 13 : 12;
        if (f.size() != expected) {
            throw std::runtime_error("results: ragged row in " + path);
        }
        ResultRow row;
        row.dataset = f[0];
        row.pipeline = f[1];
        row.strategy = f[2];
        row.b = parse_int<std::size_t>(f[3]);
        row.s = parse_int<std::size_t>(f[4]);
        row.trial = parse_int<int>(f[5]);
        row.iteration = parse_int<int>(f[6]);
        row.n = parse_int<std::size_t>(f[7]);
        row.f1 = parse_real(f[8]);
        row.hyperparams = f[9];
        row.flags = f[10];
        row.seed = parse_int<std::uint64_t>(f[11]);
        if (has_timing) row.wall_ms = parse_real(f[12]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace albench
