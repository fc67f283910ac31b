#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "albench/matrix.hpp"

namespace albench {

enum class PipelineKind { linear_margin, random_forest };

std::string to_string(PipelineKind kind);
PipelineKind pipeline_kind_from_string(const std::string& token);

// Search space for model selection. Which fields apply depends on the
// pipeline kind; defaults are the standard grids.
struct HyperGrid {
    std::vector<double> linear_c;
    std::vector<int> min_samples_leaf;
    std::vector<int> n_estimators;
    std::vector<int> max_depth;

    bool empty_for(PipelineKind kind) const;
    // every listed value must be finite and positive
    void validate_for(PipelineKind kind) const;
};

HyperGrid default_grid(PipelineKind kind);

struct PipelineSpec {
    std::string id;
    PipelineKind kind = PipelineKind::linear_margin;
    HyperGrid grid;
};

PipelineSpec make_pipeline(const std::string& token);  // "linear" | "forest"

// One grid point.
struct HyperParams {
    PipelineKind kind = PipelineKind::linear_margin;
    double c = 1.0;
    int min_samples_leaf = 1;
    int n_estimators = 10;
    int max_depth = 10;

    std::string describe() const;
};

// A fitted classifier exposing raw per-class decision scores. Immutable
// after construction; safe for concurrent prediction.
class TrainedModel {
public:
    virtual ~TrainedModel() = default;
    virtual PipelineKind kind() const = 0;
    virtual int class_count() const = 0;
    virtual std::size_t dim() const = 0;
    // One row per instance, one column per class; argmax is the prediction.
    virtual Matrix decision_scores(const Matrix& features) const = 0;
    // True when raw scores already form a probability distribution per row.
    virtual bool scores_are_probabilities() const = 0;
};

std::vector<int> predict_labels(const TrainedModel& model, const Matrix& features);

// One-vs-rest linear scorers with hinge loss, trained by deterministic
// full-batch subgradient descent (projected, 1/(lambda*t) steps with
// lambda = 1/C) for a fixed 20 epochs. Class weights are "balanced".
class LinearModel final : public TrainedModel {
public:
    LinearModel(Matrix weights, std::vector<double> bias);

    PipelineKind kind() const override { return PipelineKind::linear_margin; }
    int class_count() const override { return static_cast<int>(bias_.size()); }
    std::size_t dim() const override { return weights_.cols(); }
    Matrix decision_scores(const Matrix& features) const override;
    bool scores_are_probabilities() const override { return false; }

    const Matrix& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }

private:
    Matrix weights_;  // class_count x dim
    std::vector<double> bias_;
};

std::unique_ptr<LinearModel> fit_linear(const Matrix& features,
                                        const std::vector<int>& labels,
                                        double c_regularization);

struct MetricSpec {
    enum class Id { f1_macro } id = Id::f1_macro;
};

// Unweighted mean of per-class F1. Classes absent from the truth are
// excluded from the mean.
double f1_macro(const std::vector<int>& predicted, const std::vector<int>& truth,
                int class_count);

}  // namespace albench
