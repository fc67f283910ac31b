#include "albench/loop.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>
#include <unordered_set>

#include "albench/calibrate.hpp"
#include "albench/grid_search.hpp"
#include "albench/rng.hpp"

namespace albench {

std::size_t ExperimentConfig::iterations() const {
    if (batch_size == 0) throw std::invalid_argument("config: batch size must be positive");
    if (max_labeled < seed_size || (max_labeled - seed_size) % batch_size != 0) {
        throw std::invalid_argument(
            "config: (max_labeled - seed_size) must be a whole number of batches");
    }
    return (max_labeled - seed_size) / batch_size;
}

void ExperimentConfig::validate() const {
    if (seed_size == 0) throw std::invalid_argument("config: seed size must be positive");
    if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
        throw std::invalid_argument("config: validation_fraction must be in (0,1)");
    }
    pipeline.grid.validate_for(pipeline.kind);
    (void)iterations();
}

std::vector<int> oracle_label(const std::vector<std::size_t>& indices,
                              const DatasetBundle& bundle) {
    std::vector<int> out;
    out.reserve(indices.size());
    for (const std::size_t i : indices) {
        if (i >= bundle.size()) throw std::out_of_range("oracle_label: index out of range");
        out.push_back(bundle.labels[i]);
    }
    return out;
}

namespace {

std::vector<std::size_t> draw_seed_set(const ExperimentConfig& config,
                                       std::size_t pool_size, bool retry) {
    Rng rng(derive_seed(config.trial_seed, retry ? "seed-set-retry" : "seed-set"));
    auto idx = rng.sample_without_replacement(pool_size, config.seed_size);
    std::sort(idx.begin(), idx.end());
    return idx;
}

bool has_two_classes(const std::vector<int>& labels) {
    for (std::size_t i = 1; i < labels.size(); ++i) {
        if (labels[i] != labels[0]) return true;
    }
    return false;
}

}  // namespace

RunRecord run_trial(const ExperimentConfig& config, const DatasetBundle& pool_bundle,
                    const DatasetBundle& test_bundle, const TrialObserver& observer) {
    config.validate();
    if (pool_bundle.size() < config.max_labeled) {
        throw std::invalid_argument("run_trial: pool smaller than max_labeled");
    }
    if (test_bundle.size() == 0) throw std::invalid_argument("run_trial: empty test set");
    if (test_bundle.dim() != pool_bundle.dim() ||
        test_bundle.class_count != pool_bundle.class_count) {
        throw std::invalid_argument("run_trial: pool/test bundle mismatch");
    }

    RunRecord record;
    record.config = config;

    // Seed set: uniform, unstratified. A single-class draw is redrawn once
    // from a derived seed, then reported as an error.
    auto seed_set = draw_seed_set(config, pool_bundle.size(), false);
    auto seed_labels = oracle_label(seed_set, pool_bundle);
    if (!has_two_classes(seed_labels)) {
        record.reseeded = true;
        seed_set = draw_seed_set(config, pool_bundle.size(), true);
        seed_labels = oracle_label(seed_set, pool_bundle);
        if (!has_two_classes(seed_labels)) {
            throw std::runtime_error("run_trial: seed set single-class after reseed");
        }
    }

    PoolState pool;
    pool.labeled = seed_set;
    pool.labels_of_labeled = seed_labels;
    {
        std::unordered_set<std::size_t> in_seed(seed_set.begin(), seed_set.end());
        for (std::size_t i = 0; i < pool_bundle.size(); ++i) {
            if (!in_seed.count(i)) pool.unlabeled.push_back(i);
        }
    }

    const std::size_t iterations = config.iterations();
    std::shared_ptr<const CalibratedModel> previous_model;

    for (std::size_t t = 0; t <= iterations; ++t) {
        const auto started = std::chrono::steady_clock::now();

        if (t > 0) {
            // Query with the model from the previous iteration.
            Rng query_rng(derive_seed(config.trial_seed, "query:" + std::to_string(t)));
            auto batch = dispatch(config.strategy, *previous_model, pool_bundle.features,
                                  pool, config.batch_size, config.strategy_params,
                                  query_rng);
            const auto batch_labels = oracle_label(batch, pool_bundle);
            for (std::size_t i = 0; i < batch.size(); ++i) {
                pool.labeled.push_back(batch[i]);
                pool.labels_of_labeled.push_back(batch_labels[i]);
            }
            // keep (index, label) pairs sorted by pool index
            std::vector<std::size_t> order(pool.labeled.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
                return pool.labeled[a] < pool.labeled[b];
            });
            std::vector<std::size_t> sorted_idx(order.size());
            std::vector<int> sorted_labels(order.size());
            for (std::size_t i = 0; i < order.size(); ++i) {
                sorted_idx[i] = pool.labeled[order[i]];
                sorted_labels[i] = pool.labels_of_labeled[order[i]];
            }
            pool.labeled = std::move(sorted_idx);
            pool.labels_of_labeled = std::move(sorted_labels);

            std::unordered_set<std::size_t> queried(batch.begin(), batch.end());
            std::erase_if(pool.unlabeled, [&](std::size_t i) { return queried.count(i) > 0; });
        }
        pool.check_consistent();
        if (pool.labeled.size() + pool.unlabeled.size() != pool_bundle.size() ||
            pool.labeled.size() != config.seed_size + t * config.batch_size) {
            throw std::logic_error("run_trial: pool bookkeeping violated");
        }
        if (observer) observer(static_cast<int>(t), pool);

        const Matrix labeled_x = pool_bundle.features.take_rows(pool.labeled);
        const auto model_seed = derive_seed(config.trial_seed, "model:" + std::to_string(t));
        auto search = grid_search(config.pipeline, labeled_x, pool.labels_of_labeled,
                                  config.metric, config.validation_fraction, model_seed);

        const Matrix val_x = labeled_x.take_rows(search.validation_rows);
        std::vector<int> val_y;
        val_y.reserve(search.validation_rows.size());
        for (const std::size_t i : search.validation_rows) {
            val_y.push_back(pool.labels_of_labeled[i]);
        }
        auto calibrated = std::make_shared<CalibratedModel>(
            platt_calibrate(search.model, val_x, val_y));

        const auto predictions = calibrated->predict(test_bundle.features);
        const double score = f1_macro(predictions, test_bundle.labels,
                                      pool_bundle.class_count);

        const auto elapsed = std::chrono::duration<double, std::milli>(
                                 std::chrono::steady_clock::now() - started)
                                 .count();
        record.entries.push_back(RunEntry{static_cast<int>(t), pool.labeled.size(), score,
                                          search.chosen.describe(),
                                          calibrated->fallback_flagged(), elapsed});
        previous_model = std::move(calibrated);
    }

    record.final_labeled = pool.labeled;
    return record;
}

}  // namespace albench
