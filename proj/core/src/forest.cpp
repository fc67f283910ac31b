#include "albench/forest.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "albench/rng.hpp"

namespace albench {

const std::vector<double>& DecisionTree::predict(std::span<const double> x) const {
    std::int32_t node = 0;
    while (nodes[node].feature >= 0) {
        const auto& n = nodes[node];
        node = x[n.feature] <= n.threshold ? n.left : n.right;
    }
    return leaf_dist[nodes[node].leaf];
}

ForestModel::ForestModel(std::vector<DecisionTree> trees, int class_count, std::size_t dim)
    : trees_(std::move(trees)), class_count_(class_count), dim_(dim) {}

Matrix ForestModel::decision_scores(const Matrix& features) const {
    if (features.cols() != dim_) {
        throw std::invalid_argument("ForestModel: feature dimension mismatch");
    }
    Matrix scores(features.rows(), class_count_, 0.0);
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        auto out = scores.row(i);
        for (const auto& tree : trees_) {
            const auto& dist = tree.predict(x);
            for (int c = 0; c < class_count_; ++c) out[c] += dist[c];
        }
        const double inv = 1.0 / static_cast<double>(trees_.size());
        for (int c = 0; c < class_count_; ++c) out[c] *= inv;
    }
    return scores;
}

ForestModel ForestModel::prefix(std::size_t k) const {
    if (k == 0 || k > trees_.size()) {
        throw std::invalid_argument("ForestModel::prefix: bad tree count");
    }
    return ForestModel(std::vector<DecisionTree>(trees_.begin(), trees_.begin() + k),
                       class_count_, dim_);
}

namespace {

struct TreeBuilder {
    const Matrix& x;
    const std::vector<int>& y;
    const std::vector<double>& class_weight;  // per class id
    int class_count;
    int min_samples_leaf;
    int max_depth;
    Rng& rng;
    DecisionTree tree;

    // (value, label) pairs reused across nodes to avoid reallocation
    std::vector<std::pair<double, int>> scratch;

    std::int32_t build(std::vector<std::size_t>& samples, int depth) {
        std::vector<std::size_t> counts(class_count, 0);
        for (const std::size_t i : samples) ++counts[y[i]];
        const bool pure =
            std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }) <= 1;

        int best_feature = -1;
        double best_threshold = 0.0;
        if (!pure && depth < max_depth &&
            samples.size() >= 2 * static_cast<std::size_t>(min_samples_leaf)) {
            find_best_split(samples, counts, best_feature, best_threshold);
        }

        const auto node_id = static_cast<std::int32_t>(tree.nodes.size());
        tree.nodes.emplace_back();
        if (best_feature < 0) {
            make_leaf(node_id, counts);
            return node_id;
        }

        std::vector<std::size_t> left, right;
        for (const std::size_t i : samples) {
            (x(i, best_feature) <= best_threshold ? left : right).push_back(i);
        }
        samples.clear();
        samples.shrink_to_fit();

        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        const auto l = build(left, depth + 1);
        tree.nodes[node_id].left = l;
        const auto r = build(right, depth + 1);
        tree.nodes[node_id].right = r;
        return node_id;
    }

    void make_leaf(std::int32_t node_id, const std::vector<std::size_t>& counts) {
        std::vector<double> dist(class_count, 0.0);
        double total = 0.0;
        for (int c = 0; c < class_count; ++c) {
            dist[c] = class_weight[c] * static_cast<double>(counts[c]);
            total += dist[c];
        }
        for (double& v : dist) v /= total;
        tree.nodes[node_id].leaf = static_cast<std::int32_t>(tree.leaf_dist.size());
        tree.leaf_dist.push_back(std::move(dist));
    }

    void find_best_split(const std::vector<std::size_t>& samples,
                         const std::vector<std::size_t>& counts,
                         int& best_feature, double& best_threshold) {
        const std::size_t d = x.cols();
        const auto m = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::sqrt(static_cast<double>(d))));
        std::vector<std::size_t> feats(d);
        for (std::size_t j = 0; j < d; ++j) feats[j] = j;
        for (std::size_t j = 0; j < m; ++j) {
            std::swap(feats[j], feats[j + rng.uniform_index(d - j)]);
        }

        const double n = static_cast<double>(samples.size());
        double best_impurity = 1e300;
        std::vector<double> left_counts(class_count), right_counts(class_count);

        for (std::size_t fi = 0; fi < m; ++fi) {
            const int f = static_cast<int>(feats[fi]);
            scratch.clear();
            for (const std::size_t i : samples) scratch.emplace_back(x(i, f), y[i]);
            std::sort(scratch.begin(), scratch.end());

            std::fill(left_counts.begin(), left_counts.end(), 0.0);
            for (int c = 0; c < class_count; ++c) right_counts[c] = static_cast<double>(counts[c]);
            double left_sq = 0.0;  // sum of squared class counts, kept incrementally
            double right_sq = 0.0;
            for (const double v : right_counts) right_sq += v * v;

            for (std::size_t i = 0; i + 1 < scratch.size(); ++i) {
                const int c = scratch[i].second;
                left_sq += 2.0 * left_counts[c] + 1.0;
                left_counts[c] += 1.0;
                right_sq += -2.0 * right_counts[c] + 1.0;
                right_counts[c] -= 1.0;

                if (scratch[i].first == scratch[i + 1].first) continue;
                const double n_left = static_cast<double>(i + 1);
                const double n_right = n - n_left;
                if (n_left < min_samples_leaf || n_right < min_samples_leaf) continue;
                // weighted Gini: sum over sides of n_side * (1 - sum p^2)
                const double impurity = n - left_sq / n_left - right_sq / n_right;
                if (impurity < best_impurity) {
                    best_impurity = impurity;
                    best_feature = f;
                    best_threshold = scratch[i].first + 0.5 * (scratch[i + 1].first - scratch[i].first);
                }
            }
        }
    }
};

}  // namespace

std::unique_ptr<ForestModel> fit_forest(const Matrix& features,
                                        const std::vector<int>& labels,
                                        int min_samples_leaf, int n_estimators,
                                        int max_depth, std::uint64_t seed) {
    if (features.rows() != labels.size() || features.rows() == 0) {
        throw std::invalid_argument("fit_forest: feature/label shape mismatch");
    }
    if (min_samples_leaf < 1 || n_estimators < 1 || max_depth < 1) {
        throw std::invalid_argument("fit_forest: parameters must be positive");
    }
    int class_count = 0;
    for (const int y : labels) class_count = std::max(class_count, y + 1);
    std::vector<double> class_counts(class_count, 0.0);
    for (const int y : labels) class_counts[y] += 1.0;
    if (std::count_if(class_counts.begin(), class_counts.end(),
                      [](double c) { return c > 0.0; }) < 2) {
        throw std::invalid_argument("fit_forest: needs at least 2 classes");
    }

    // Balanced weights from the full training labels; used in leaf votes.
    std::vector<double> class_weight(class_count, 0.0);
    const double n = static_cast<double>(labels.size());
    for (int c = 0; c < class_count; ++c) {
        if (class_counts[c] > 0.0) {
            class_weight[c] = n / (static_cast<double>(class_count) * class_counts[c]);
        }
    }

    std::vector<DecisionTree> trees;
    trees.reserve(n_estimators);
    const std::size_t rows = features.rows();
    for (int t = 0; t < n_estimators; ++t) {
        Rng tree_rng(derive_seed(seed, "tree:" + std::to_string(t)));
        std::vector<std::size_t> bootstrap(rows);
        for (std::size_t i = 0; i < rows; ++i) bootstrap[i] = tree_rng.uniform_index(rows);

        TreeBuilder builder{features, labels, class_weight, class_count,
                            min_samples_leaf, max_depth, tree_rng, {}, {}};
        builder.build(bootstrap, 0);
        trees.push_back(std::move(builder.tree));
    }
    return std::make_unique<ForestModel>(std::move(trees), class_count, features.cols());
}

}  // namespace albench
