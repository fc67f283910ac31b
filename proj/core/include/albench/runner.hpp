#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "albench/analysis.hpp"
#include "albench/dataset.hpp"
#include "albench/loop.hpp"
#include "albench/results.hpp"

namespace albench {

// A dataset reference in a matrix config: a CSV path or a synthetic spec.
struct DatasetSpec {
    std::string id;
    std::string csv_path;  // empty for synthetic
    bool synthetic = false;
    int classes = 2;
    std::size_t dim = 2;
    std::size_t per_class = 100;
    double separation = 1.0;
    std::uint64_t generator_seed = 0;
};

DatasetSpec parse_dataset_token(const std::string& token);
DatasetBundle resolve_dataset(const DatasetSpec& spec);

// Disjoint stratified pool and test bundles drawn from one source bundle.
struct PoolTestSplit {
    DatasetBundle pool;
    DatasetBundle test;
};

PoolTestSplit make_pool_and_test(const DatasetBundle& bundle, const SplitSpec& split,
                                 std::uint64_t base_seed);

struct MatrixConfig {
    std::vector<DatasetSpec> datasets;
    std::vector<PipelineSpec> pipelines;
    std::vector<StrategyId> strategies;
    std::vector<std::pair<std::size_t, std::size_t>> batch_seed;  // (b, s)
    int trials = 3;
    std::uint64_t base_seed = 0;
    std::size_t max_labeled = 5000;
    SplitSpec split;
    std::string out_dir;
    StrategyParams strategy_params;

    void validate() const;
};

// Flat key=value text; `#` starts a comment; lists are comma-separated.
// Unknown keys are errors.
MatrixConfig parse_matrix_config(const std::string& path);

// Cartesian product of datasets x pipelines x strategies x (b,s) x trials.
// The per-trial seed is derived from everything except the strategy, so
// changing the strategy never perturbs the seed set.
std::vector<ExperimentConfig> expand_matrix(const MatrixConfig& config);

std::string trial_key(const ExperimentConfig& config);

// Runs every trial not yet marked complete in <out_dir>/manifest.txt,
// appending rows to <out_dir>/trials.csv as trials finish, then writes the
// sorted canonical <out_dir>/results.csv. Output is independent of the
// worker count and of completion order.
ResultsTable run_matrix(const MatrixConfig& config, unsigned workers);

enum class ReportKind { delta_curves, heatmap_cells, always_on, variance_profile, tests };

ReportKind report_kind_from_string(const std::string& token);

// Renders one report CSV from a results table.
std::string export_report(const ResultsTable& table, ReportKind kind);
void export_report_file(const ResultsTable& table, ReportKind kind,
                        const std::string& out_path);

}  // namespace albench
