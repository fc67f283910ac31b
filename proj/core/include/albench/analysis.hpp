#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "albench/loop.hpp"
#include "albench/qstrat.hpp"
#include "albench/results.hpp"

namespace albench {

// One relative-improvement observation: a non-random strategy's score at an
// aligned label count, as a percent over the same trial's random baseline.
struct ImprovementRecord {
    std::string pipeline;
    StrategyId strategy = StrategyId::margin;  // never random
    std::string dataset;
    std::size_t b = 0;
    std::size_t s = 0;
    int trial = 0;
    std::size_t n = 0;   // on the aligned grid
    double delta = 0.0;  // percent
    bool defined = true; // false when the baseline score was 0
};

struct Delta {
    double value = 0.0;
    bool defined = true;
};

// 100 * (f_q - f_r) / f_r; undefined (and excluded from aggregates) when the
// baseline is 0.
Delta relative_improvement(double f_q, double f_r);

// Nearest target size; equidistant sources go to the smaller target.
std::size_t align_label_sizes(std::size_t n, const std::vector<std::size_t>& source_grid,
                              const std::vector<std::size_t>& target_grid);

struct RecordFilter {
    std::optional<std::string> pipeline;
    std::optional<StrategyId> strategy;
    std::optional<std::string> dataset;
    std::optional<std::pair<std::size_t, std::size_t>> batch_seed;
    std::optional<std::size_t> n;

    bool matches(const ImprovementRecord& r) const;
};

// Simple mean of the matching defined records (the uniform decision model).
double expected_improvement(const std::vector<ImprovementRecord>& records,
                            const RecordFilter& fixed);

struct AlwaysOnSummary {
    double pct_negative = 0.0;            // % of deltas strictly below zero
    std::optional<double> mean_nonneg;    // mean over deltas >= 0, absent if none
    double mean = 0.0;
    std::optional<double> std_nonneg;     // population std over deltas >= 0
    double stddev = 0.0;                  // population std over all deltas
};

AlwaysOnSummary always_on_summary(const std::vector<double>& deltas);

// Mean-over-trials F1 for one (pipeline, dataset, strategy, n) cell.
struct ScoreCell {
    std::string pipeline;
    std::string dataset;
    std::string strategy;
    std::size_t n = 0;
    double mean_f1 = 0.0;
};

// Per (pipeline, dataset, n): population variance of the cell means across
// strategies; then the mean of those variances per n.
std::map<std::size_t, double> variance_profile(const std::vector<ScoreCell>& cells);
std::map<std::size_t, double> variance_profile(const std::vector<RunRecord>& runs);

enum class Alternative { two_sided, greater, less };

struct WilcoxonResult {
    double statistic = 0.0;  // W+: rank sum of positive differences
    double p_value = 1.0;
    std::size_t n_effective = 0;
    bool exact = false;
};

// Signed-rank test. Zero differences are dropped; exact p by full sign
// enumeration when n <= 12 and the |differences| are tie-free, otherwise the
// normal approximation with tie and continuity corrections.
WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y, Alternative alternative);

// Within-block tie-averaged ranks; rows = blocks, columns = treatments.
struct RankMatrix {
    std::vector<std::vector<double>> ranks;

    std::size_t blocks() const { return ranks.size(); }
    std::size_t treatments() const { return ranks.empty() ? 0 : ranks[0].size(); }
};

RankMatrix rank_blocks(const std::vector<std::vector<double>>& values);

struct FriedmanResult {
    double chi2 = 0.0;
    int df = 0;
    double p_value = 1.0;
};

FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks);
double kendalls_w(const std::vector<std::vector<double>>& blocks);

enum class TreatmentAxis { strategy, pipeline };

// Matched observation blocks for the effect-size analysis: one row per
// complete combination of the non-treatment keys, one column per treatment.
// Returns the value matrix and the treatment names in column order.
std::pair<std::vector<std::vector<double>>, std::vector<std::string>> matched_blocks(
    const std::vector<ImprovementRecord>& records, TreatmentAxis axis);

// ---- bridge from the runner's results table ----

// Target alignment grid: the label sizes reached by the largest batch size.
std::vector<std::size_t> alignment_target_grid(const ResultsTable& table);

// Per-row deltas against the same-trial random baseline, aligned onto the
// target grid. Throws when a baseline row is missing.
std::vector<ImprovementRecord> improvement_records(const ResultsTable& table);

}  // namespace albench
