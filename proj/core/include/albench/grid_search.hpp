#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "albench/model.hpp"

namespace albench {

struct GridSearchResult {
    std::shared_ptr<TrainedModel> model;  // trained on the train part
    HyperParams chosen;
    double validation_metric = 0.0;
    // Row positions into the labeled arrays passed to grid_search.
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> validation_rows;
};

// Model selection against a label-stratified validation split. One candidate
// per grid point, scored by macro-F1 of the raw-score argmax on validation;
// ties go to the earlier grid point (document order: C for linear;
// min_samples_leaf, then n_estimators, then max_depth for forests).
GridSearchResult grid_search(const PipelineSpec& spec, const Matrix& features,
                             const std::vector<int>& labels, MetricSpec metric,
                             double validation_fraction, std::uint64_t seed);

}  // namespace albench
