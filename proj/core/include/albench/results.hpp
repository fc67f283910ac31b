#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace albench {

// One flat row of the results table: a single (trial, iteration) score, or
// an error marker (iteration = -1) for a failed trial.
struct ResultRow {
    std::string dataset;
    std::string pipeline;
    std::string strategy;
    std::size_t b = 0;
    std::size_t s = 0;
    int trial = 0;
    int iteration = 0;
    std::size_t n = 0;
    double f1 = 0.0;
    std::string hyperparams;
    std::string flags;  // semicolon-separated
    std::uint64_t seed = 0;
    double wall_ms = 0.0;

    bool is_error() const { return iteration < 0; }
};

struct ResultsTable {
    std::vector<ResultRow> rows;

    // Order by (dataset, pipeline, strategy, b, s, trial, iteration).
    void sort_canonical();
    // Throws when the primary key is not unique.
    void check_primary_key() const;

    // `include_timing=false` drops the wall_ms column; every remaining byte
    // is determined by the run configuration.
    std::string to_csv(bool include_timing = true) const;

    static ResultsTable from_csv(const std::string& path);
};

std::string result_csv_header(bool include_timing = true);
std::string format_result_row(const ResultRow& row, bool include_timing = true);

}  // namespace albench
