#include "albench/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace albench {

std::string to_string(PipelineKind kind) {
    return kind == PipelineKind::linear_margin ? "linear" : "forest";
}

PipelineKind pipeline_kind_from_string(const std::string& token) {
    if (token == "linear") return PipelineKind::linear_margin;
    if (token == "forest") return PipelineKind::random_forest;
    throw std::invalid_argument("unknown pipeline kind '" + token + "'");
}

bool HyperGrid::empty_for(PipelineKind kind) const {
    if (kind == PipelineKind::linear_margin) return linear_c.empty();
    return min_samples_leaf.empty() || n_estimators.empty() || max_depth.empty();
}

void HyperGrid::validate_for(PipelineKind kind) const {
    if (empty_for(kind)) throw std::invalid_argument("hyperparameter grid is empty");
    if (kind == PipelineKind::linear_margin) {
        for (const double c : linear_c) {
            if (!(c > 0.0) || !std::isfinite(c)) {
                throw std::invalid_argument("grid: C values must be finite and positive");
            }
        }
        return;
    }
    for (const auto& values : {min_samples_leaf, n_estimators, max_depth}) {
        for (const int v : values) {
            if (v <= 0) throw std::invalid_argument("grid: forest values must be positive");
        }
    }
}

HyperGrid default_grid(PipelineKind kind) {
    HyperGrid grid;
    if (kind == PipelineKind::linear_margin) {
        grid.linear_c = {0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0};
    } else {
        grid.min_samples_leaf = {1, 5, 9};
        grid.n_estimators = {5, 10, 20, 30, 40, 50};
        grid.max_depth = {5, 10, 15, 20, 25, 30};
    }
    return grid;
}

PipelineSpec make_pipeline(const std::string& token) {
    PipelineSpec spec;
    spec.id = token;
    spec.kind = pipeline_kind_from_string(token);
    spec.grid = default_grid(spec.kind);
    return spec;
}

std::string HyperParams::describe() const {
    if (kind == PipelineKind::linear_margin) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "C=%g", c);
        return buf;
    }
    return "min_samples_leaf=" + std::to_string(min_samples_leaf) +
           ";n_estimators=" + std::to_string(n_estimators) +
           ";max_depth=" + std::to_string(max_depth);
}

std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features) {
    const Matrix scores = model.decision_scores(features);
    std::vector<int> out(scores.rows());
    for (std::size_t i = 0; i < scores.rows(); ++i) {
        const auto row = scores.row(i);
        out[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return out;
}

LinearModel::LinearModel(Matrix weights, std::vector<double> bias)
    : weights_(std::move(weights)), bias_(std::move(bias)) {
    if (weights_.rows() != bias_.size()) {
        throw std::invalid_argument("LinearModel: weight/bias shape mismatch");
    }
}

Matrix LinearModel::decision_scores(const Matrix& features) const {
    if (features.cols() != weights_.cols()) {
        throw std::invalid_argument("LinearModel: feature dimension mismatch");
    }
    Matrix scores(features.rows(), bias_.size());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        const auto x = features.row(i);
        for (std::size_t c = 0; c < bias_.size(); ++c) {
            const auto w = weights_.row(c);
            double s = bias_[c];
            for (std::size_t j = 0; j < x.size(); ++j) s += w[j] * x[j];
            scores(i, c) = s;
        }
    }
    return scores;
}

namespace {

// n / (k * n_c) per instance, the "balanced" scheme.
std::vector<double> balanced_weights(const std::vector<int>& labels, int class_count) {
    std::vector<double> class_counts(class_count, 0.0);
    for (const int y : labels) class_counts[y] += 1.0;
    const double n = static_cast<double>(labels.size());
    std::vector<double> w(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        w[i] = n / (static_cast<double>(class_count) * class_counts[labels[i]]);
    }
    return w;
}

}  // namespace

std::unique_ptr<LinearModel> fit_linear(const Matrix& features,
                                        const std::vector<int>& labels,
                                        double c_regularization) {
    if (features.rows() != labels.size() || features.rows() == 0) {
        throw std::invalid_argument("fit_linear: feature/label shape mismatch");
    }
    if (!(c_regularization > 0.0)) {
        throw std::invalid_argument("fit_linear: C must be positive");
    }
    int class_count = 0;
    for (const int y : labels) class_count = std::max(class_count, y + 1);
    {
        std::vector<bool> seen(class_count, false);
        for (const int y : labels) seen[y] = true;
        int present = 0;
        for (const bool s : seen) present += s;
        if (present < 2) throw std::invalid_argument("fit_linear: needs at least 2 classes");
    }

    const std::size_t n = features.rows();
    const std::size_t d = features.cols();
    const auto sample_weight = balanced_weights(labels, class_count);
    double weight_total = 0.0;
    for (const double w : sample_weight) weight_total += w;

    constexpr int kEpochs = 20;
    const double lambda = 1.0 / c_regularization;
    const double radius = std::sqrt(c_regularization);  // 1/sqrt(lambda)

    Matrix weights(class_count, d, 0.0);
    std::vector<double> bias(class_count, 0.0);
    std::vector<double> grad(d);

    for (int c = 0; c < class_count; ++c) {
        auto w = weights.row(c);
        double b = 0.0;
        for (int epoch = 1; epoch <= kEpochs; ++epoch) {
            std::fill(grad.begin(), grad.end(), 0.0);
            double grad_b = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double y = labels[i] == c ? 1.0 : -1.0;
                const auto x = features.row(i);
                double score = b;
                for (std::size_t j = 0; j < d; ++j) score += w[j] * x[j];
                if (y * score < 1.0) {
                    const double g = sample_weight[i] * y;
                    for (std::size_t j = 0; j < d; ++j) grad[j] += g * x[j];
                    grad_b += g;
                }
            }
            const double step = c_regularization / static_cast<double>(epoch);
            for (std::size_t j = 0; j < d; ++j) {
                w[j] -= step * (lambda * w[j] - grad[j] / weight_total);
            }
            b += step * grad_b / weight_total;
            // Pegasos projection onto the ball that contains the optimum.
            double norm_sq = 0.0;
            for (std::size_t j = 0; j < d; ++j) norm_sq += w[j] * w[j];
            if (norm_sq > radius * radius) {
                const double shrink = radius / std::sqrt(norm_sq);
                for (std::size_t j = 0; j < d; ++j) w[j] *= shrink;
            }
        }
        bias[c] = b;
    }
    return std::make_unique<LinearModel>(std::move(weights), std::move(bias));
}

double f1_macro(const std::vector<int>& predicted, const std::vector<int>& truth,
                int class_count) {
    if (predicted.size() != truth.size()) {
        throw std::invalid_argument("f1_macro: length mismatch");
    }
    if (predicted.empty()) throw std::invalid_argument("f1_macro: empty input");

    std::vector<std::size_t> tp(class_count, 0), fp(class_count, 0), fn(class_count, 0);
    std::vector<bool> in_truth(class_count, false);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i];
        const int p = predicted[i];
        if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
            throw std::invalid_argument("f1_macro: label outside 0..C-1");
        }
        in_truth[t] = true;
        if (p == t) {
            ++tp[t];
        } else {
            ++fp[p];
            ++fn[t];
        }
    }

    double sum = 0.0;
    int counted = 0;
    for (int c = 0; c < class_count; ++c) {
        if (!in_truth[c]) continue;  // absent from truth: excluded from the mean
        const double denom = 2.0 * static_cast<double>(tp[c]) +
                             static_cast<double>(fp[c]) + static_cast<double>(fn[c]);
        sum += denom > 0.0 ? 2.0 * static_cast<double>(tp[c]) / denom : 0.0;
        ++counted;
    }
    return counted > 0 ? sum / counted : 0.0;
}

}  // namespace albench
