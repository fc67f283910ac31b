#include "albench/grid_search.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "albench/dataset.hpp"
#include "albench/forest.hpp"
#include "albench/rng.hpp"

namespace albench {

GridSearchResult grid_search(const PipelineSpec& spec, const Matrix& features,
                             const std::vector<int>& labels, MetricSpec metric,
                             double validation_fraction, std::uint64_t seed) {
    (void)metric;  // only f1_macro exists
    if (spec.grid.empty_for(spec.kind)) {
        throw std::invalid_argument("grid_search: empty grid for pipeline " + spec.id);
    }
    if (features.rows() != labels.size() || labels.empty()) {
        throw std::invalid_argument("grid_search: feature/label shape mismatch");
    }

    std::vector<std::size_t> all(labels.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    Rng split_rng(derive_seed(seed, "split"));
    auto split = split_validation(all, labels, validation_fraction, split_rng);

    const Matrix train_x = features.take_rows(split.train);
    const Matrix val_x = features.take_rows(split.validation);
    std::vector<int> train_y, val_y;
    train_y.reserve(split.train.size());
    val_y.reserve(split.validation.size());
    for (const std::size_t i : split.train) train_y.push_back(labels[i]);
    for (const std::size_t i : split.validation) val_y.push_back(labels[i]);
    if (val_y.empty()) {
        throw std::invalid_argument("grid_search: validation split is empty");
    }
    int class_count = 0;
    for (const int y : labels) class_count = std::max(class_count, y + 1);

    const auto score_on_validation = [&](const TrainedModel& model) {
        return f1_macro(predict_labels(model, val_x), val_y, class_count);
    };

    GridSearchResult result;
    result.train_rows = split.train;
    result.validation_rows = split.validation;
    result.validation_metric = -1.0;

    if (spec.kind == PipelineKind::linear_margin) {
        for (const double c : spec.grid.linear_c) {
            auto candidate = fit_linear(train_x, train_y, c);
            const double value = score_on_validation(*candidate);
            if (value > result.validation_metric) {
                result.validation_metric = value;
                result.model = std::shared_ptr<TrainedModel>(std::move(candidate));
                result.chosen = HyperParams{spec.kind, c, 0, 0, 0};
            }
        }
        return result;
    }

    // Forest: tree i depends only on (seed, i), so every n_estimators value
    // for one (min_samples_leaf, max_depth) pair is a prefix of the largest
    // forest for that pair. Train that one and slice.
    int max_estimators = 0;
    for (const int m : spec.grid.n_estimators) max_estimators = std::max(max_estimators, m);
    std::map<std::pair<int, int>, std::shared_ptr<ForestModel>> full_forests;
    for (const int msl : spec.grid.min_samples_leaf) {
        for (const int n_est : spec.grid.n_estimators) {
            for (const int depth : spec.grid.max_depth) {
                auto key = std::make_pair(msl, depth);
                auto it = full_forests.find(key);
                if (it == full_forests.end()) {
                    const auto cand_seed = derive_seed(
                        seed, "cand:msl=" + std::to_string(msl) + ":depth=" + std::to_string(depth));
                    it = full_forests
                             .emplace(key, std::shared_ptr<ForestModel>(fit_forest(
                                               train_x, train_y, msl, max_estimators, depth,
                                               cand_seed)))
                             .first;
                }
                auto candidate = std::make_shared<ForestModel>(it->second->prefix(n_est));
                const double value = score_on_validation(*candidate);
                if (value > result.validation_metric) {
                    result.validation_metric = value;
                    result.model = std::move(candidate);
                    result.chosen = HyperParams{spec.kind, 0.0, msl, n_est, depth};
                }
            }
        }
    }
    return result;
}

}  // namespace albench
