#include "albench/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace albench {

namespace {

// Negative log-likelihood of the sigmoid fit, evaluated without overflow.
double platt_objective(const std::vector<double>& scores,
                       const std::vector<double>& target, double a, double b) {
    double f = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const double z = a * scores[i] + b;
        if (z >= 0.0) {
            f += target[i] * z + std::log1p(std::exp(-z));
        } else {
            f += (target[i] - 1.0) * z + std::log1p(std::exp(z));
        }
    }
    return f;
}

}  // namespace

SigmoidCalibration fit_platt_sigmoid(const std::vector<double>& scores,
                                     const std::vector<bool>& positive) {
    if (scores.size() != positive.size() || scores.empty()) {
        throw std::invalid_argument("fit_platt_sigmoid: shape mismatch");
    }
    double n_pos = 0.0, n_neg = 0.0;
    for (const bool p : positive) (p ? n_pos : n_neg) += 1.0;
    if (n_pos == 0.0 || n_neg == 0.0) {
        throw std::invalid_argument("fit_platt_sigmoid: needs both classes");
    }
    for (const double s : scores) {
        if (!std::isfinite(s)) throw std::invalid_argument("fit_platt_sigmoid: non-finite score");
    }

    // Smoothed targets.
    const double hi = (n_pos + 1.0) / (n_pos + 2.0);
    const double lo = 1.0 / (n_neg + 2.0);
    std::vector<double> target(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) target[i] = positive[i] ? hi : lo;

    constexpr int kMaxIter = 100;
    constexpr double kMinStep = 1e-10;
    constexpr double kSigma = 1e-12;

    double a = 0.0;
    double b = std::log((n_neg + 1.0) / (n_pos + 1.0));
    double fval = platt_objective(scores, target, a, b);

    for (int iter = 0; iter < kMaxIter; ++iter) {
        double h11 = kSigma, h22 = kSigma, h21 = 0.0, g1 = 0.0, g2 = 0.0;
        for (std::size_t i = 0; i < scores.size(); ++i) {
            const double z = a * scores[i] + b;
            double p, q;
            if (z >= 0.0) {
                p = std::exp(-z) / (1.0 + std::exp(-z));
                q = 1.0 / (1.0 + std::exp(-z));
            } else {
                p = 1.0 / (1.0 + std::exp(z));
                q = std::exp(z) / (1.0 + std::exp(z));
            }
            const double pq = p * q;
            h11 += scores[i] * scores[i] * pq;
            h22 += pq;
            h21 += scores[i] * pq;
            const double diff = target[i] - p;
            g1 += scores[i] * diff;
            g2 += diff;
        }
        if (std::abs(g1) < 1e-5 && std::abs(g2) < 1e-5) break;

        const double det = h11 * h22 - h21 * h21;
        const double da = -(h22 * g1 - h21 * g2) / det;
        const double db = -(-h21 * g1 + h11 * g2) / det;
        const double gd = g1 * da + g2 * db;

        double step = 1.0;
        bool accepted = false;
        while (step >= kMinStep) {
            const double na = a + step * da;
            const double nb = b + step * db;
            const double nf = platt_objective(scores, target, na, nb);
            if (nf < fval + 1e-4 * step * gd) {
                a = na;
                b = nb;
                fval = nf;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if (!accepted) break;  // line search failed; current point is as good as it gets
    }
    return SigmoidCalibration{a, b, false};
}

CalibratedModel::CalibratedModel(std::shared_ptr<const TrainedModel> base,
                                 std::vector<SigmoidCalibration> per_class,
                                 bool fallback_flagged)
    : base_(std::move(base)),
      per_class_(std::move(per_class)),
      fallback_flagged_(fallback_flagged) {
    if (!base_) throw std::invalid_argument("CalibratedModel: null base model");
    if (per_class_.size() != static_cast<std::size_t>(base_->class_count())) {
        throw std::invalid_argument("CalibratedModel: one calibration per class required");
    }
}

CalibratedModel CalibratedModel::identity(std::shared_ptr<const TrainedModel> base) {
    if (!base) throw std::invalid_argument("CalibratedModel::identity: null base model");
    std::vector<SigmoidCalibration> maps(base->class_count(),
                                         SigmoidCalibration{-1.0, 0.0, true});
    return CalibratedModel(std::move(base), std::move(maps), false);
}

Matrix CalibratedModel::predict_proba(const Matrix& features) const {
    if (features.cols() != base_->dim()) {
        throw std::invalid_argument("predict_proba: feature dimension mismatch");
    }
    Matrix out = base_->decision_scores(features);
    const bool prob_scores = base_->scores_are_probabilities();
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        double total = 0.0;
        for (std::size_t c = 0; c < row.size(); ++c) {
            const auto& cal = per_class_[c];
            double v;
            if (cal.identity && prob_scores) {
                v = std::clamp(row[c], 0.0, 1.0);
            } else {
                const double a = cal.identity ? -1.0 : cal.a;
                const double b = cal.identity ? 0.0 : cal.b;
                const double z = a * row[c] + b;
                v = z >= 0.0 ? std::exp(-z) / (1.0 + std::exp(-z)) : 1.0 / (1.0 + std::exp(z));
            }
            row[c] = v;
            total += v;
        }
        if (total <= 1e-300) {
            for (std::size_t c = 0; c < row.size(); ++c) row[c] = 1.0 / row.size();
        } else {
            for (std::size_t c = 0; c < row.size(); ++c) row[c] /= total;
        }
    }
    return out;
}

std::vector<int> CalibratedModel::predict(const Matrix& features) const {
    const Matrix proba = predict_proba(features);
    std::vector<int> labels(proba.rows());
    for (std::size_t i = 0; i < proba.rows(); ++i) {
        const auto row = proba.row(i);
        labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }
    return labels;
}

CalibratedModel platt_calibrate(std::shared_ptr<const TrainedModel> model,
                                const Matrix& val_features,
                                const std::vector<int>& val_labels) {
    if (!model) throw std::invalid_argument("platt_calibrate: null model");
    if (val_features.rows() != val_labels.size() || val_labels.empty()) {
        throw std::invalid_argument("platt_calibrate: feature/label shape mismatch");
    }
    const Matrix scores = model->decision_scores(val_features);
    for (const double s : scores.data()) {
        if (!std::isfinite(s)) throw std::invalid_argument("platt_calibrate: non-finite scores");
    }

    const int k = model->class_count();
    std::vector<SigmoidCalibration> maps;
    maps.reserve(k);
    bool fallback = false;
    std::vector<double> class_scores(scores.rows());
    std::vector<bool> positive(scores.rows());
    for (int c = 0; c < k; ++c) {
        std::size_t n_pos = 0;
        for (std::size_t i = 0; i < scores.rows(); ++i) {
            class_scores[i] = scores(i, c);
            positive[i] = val_labels[i] == c;
            n_pos += positive[i];
        }
        if (n_pos == 0 || n_pos == scores.rows()) {
            maps.push_back(SigmoidCalibration{-1.0, 0.0, true});
            fallback = true;
        } else {
            maps.push_back(fit_platt_sigmoid(class_scores, positive));
        }
    }
    return CalibratedModel(std::move(model), std::move(maps), fallback);
}

bool is_probability_matrix(const Matrix& m, double tolerance) {
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double total = 0.0;
        for (const double v : m.row(i)) {
            if (v < 0.0 || v > 1.0 || !std::isfinite(v)) return false;
            total += v;
        }
        if (std::abs(total - 1.0) > tolerance) return false;
    }
    return true;
}

}  // namespace albench
