#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "albench/model.hpp"

namespace albench {

// Axis-aligned decision tree with Gini splits. Leaves store a
// balanced-class-weighted probability distribution.
struct DecisionTree {
    struct Node {
        int feature = -1;          // -1 marks a leaf
        double threshold = 0.0;    // go left when x[feature] <= threshold
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::int32_t leaf = -1;    // index into leaf_dist when a leaf
    };
    std::vector<Node> nodes;
    std::vector<std::vector<double>> leaf_dist;

    const std::vector<double>& predict(std::span<const double> x) const;
};

// Bagged Gini trees, sqrt(d) features per split, balanced class weights in
// the leaf vote aggregation. Tree i depends only on (seed, i), so a forest
// with fewer estimators is a prefix of a larger one under the same seed.
class ForestModel final : public TrainedModel {
public:
    ForestModel(std::vector<DecisionTree> trees, int class_count, std::size_t dim);

    PipelineKind kind() const override { return PipelineKind::random_forest; }
    int class_count() const override { return class_count_; }
    std::size_t dim() const override { return dim_; }
    Matrix decision_scores(const Matrix& features) const override;
    bool scores_are_probabilities() const override { return true; }

    std::size_t tree_count() const { return trees_.size(); }
    // First k trees as their own forest.
    ForestModel prefix(std::size_t k) const;

private:
    std::vector<DecisionTree> trees_;
    int class_count_;
    std::size_t dim_;
};

std::unique_ptr<ForestModel> fit_forest(const Matrix& features,
                                        const std::vector<int>& labels,
                                        int min_samples_leaf, int n_estimators,
                                        int max_depth, std::uint64_t seed);

}  // namespace albench
