#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "albench/dataset.hpp"
#include "albench/model.hpp"
#include "albench/qstrat.hpp"

namespace albench {

enum class SeedStrategy { random };

// Everything that determines one trial. Two trials with equal configs
// produce identical records (modulo wall-clock timings).
struct ExperimentConfig {
    std::string dataset_id;
    PipelineSpec pipeline;
    StrategyId strategy = StrategyId::random;
    std::size_t batch_size = 0;   // b
    std::size_t seed_size = 0;    // s
    std::size_t max_labeled = 5000;
    SeedStrategy seed_strategy = SeedStrategy::random;
    MetricSpec metric;
    double validation_fraction = 0.2;
    std::uint64_t trial_seed = 0;
    int trial_index = 0;
    StrategyParams strategy_params;

    // Number of querying iterations T; throws when (max_labeled - s) is not
    // a whole number of batches.
    std::size_t iterations() const;
    void validate() const;
};

struct RunEntry {
    int iteration = 0;     // t
    std::size_t n = 0;     // labeled-set size s + t*b
    double f1 = 0.0;       // macro-F1 on the test set
    std::string hyperparams;
    bool calibration_fallback = false;
    double wall_ms = 0.0;
};

struct RunRecord {
    ExperimentConfig config;
    bool reseeded = false;  // the seed set had to be redrawn once
    std::vector<RunEntry> entries;  // T+1 of them, t = 0..T
    std::vector<std::size_t> final_labeled;
};

// Ground-truth lookup standing in for the human annotator.
std::vector<int> oracle_label(const std::vector<std::size_t>& indices,
                              const DatasetBundle& bundle);

using TrialObserver = std::function<void(int iteration, const PoolState& pool)>;

// One batch-AL trial: seed, then per iteration grid-search + calibrate +
// score on test; batches for iteration t are chosen with model M_{t-1}.
RunRecord run_trial(const ExperimentConfig& config, const DatasetBundle& pool_bundle,
                    const DatasetBundle& test_bundle,
                    const TrialObserver& observer = {});

}  // namespace albench
