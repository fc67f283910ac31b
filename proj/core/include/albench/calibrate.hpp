#pragma once

#include <memory>
#include <vector>

#include "albench/model.hpp"

namespace albench {

// Per-class sigmoid p(s) = 1 / (1 + exp(a*s + b)). `identity` marks the
// degenerate-validation fallback: probability-kind scores pass through,
// margin-kind scores go through the plain logistic link (a=-1, b=0).
struct SigmoidCalibration {
    double a = -1.0;
    double b = 0.0;
    bool identity = false;
};

// Fit one sigmoid on (score, binary label) pairs by damped Newton descent of
// the Platt-smoothed negative log-likelihood.
SigmoidCalibration fit_platt_sigmoid(const std::vector<double>& scores,
                                     const std::vector<bool>& positive);

// A trained model plus its per-class calibration map. Rows of
// predict_proba() are non-negative and sum to 1.
class CalibratedModel {
public:
    CalibratedModel(std::shared_ptr<const TrainedModel> base,
                    std::vector<SigmoidCalibration> per_class,
                    bool fallback_flagged);

    // No fitted adjustment at all; every class uses the identity map.
    static CalibratedModel identity(std::shared_ptr<const TrainedModel> base);

    Matrix predict_proba(const Matrix& features) const;
    std::vector<int> predict(const Matrix& features) const;

    const TrainedModel& base() const { return *base_; }
    int class_count() const { return base_->class_count(); }
    bool fallback_flagged() const { return fallback_flagged_; }
    const std::vector<SigmoidCalibration>& calibration() const { return per_class_; }

private:
    std::shared_ptr<const TrainedModel> base_;
    std::vector<SigmoidCalibration> per_class_;
    bool fallback_flagged_ = false;
};

// One-vs-rest Platt scaling on a validation set. Classes whose validation
// slice lacks a positive or a negative fall back to the identity map and set
// the fallback flag.
CalibratedModel platt_calibrate(std::shared_ptr<const TrainedModel> model,
                                const Matrix& val_features,
                                const std::vector<int>& val_labels);

bool is_probability_matrix(const Matrix& m, double tolerance = 1e-9);

}  // namespace albench
