#pragma once

#include <memory>
#include <stdexcept>
#include <vector>

#include "albench/calibrate.hpp"
#include "albench/model.hpp"

namespace albench::testing {

// Emits preset probability rows as its decision scores; with identity
// calibration those rows come back unchanged from predict_proba.
class FixedModel final : public TrainedModel {
public:
    explicit FixedModel(Matrix rows, std::size_t dim)
        : rows_(std::move(rows)), dim_(dim) {}

    PipelineKind kind() const override { return PipelineKind::random_forest; }
    int class_count() const override { return static_cast<int>(rows_.cols()); }
    std::size_t dim() const override { return dim_; }
    bool scores_are_probabilities() const override { return true; }

    static constexpr double kIdScale = 1e-6;

    Matrix decision_scores(const Matrix& features) const override {
        // features carry the (scaled-down) row id in column 0
        Matrix out(features.rows(), rows_.cols());
        for (std::size_t i = 0; i < features.rows(); ++i) {
            const auto id = static_cast<std::size_t>(features(i, 0) / kIdScale + 0.5);
            if (id >= rows_.rows()) throw std::out_of_range("FixedModel: row id out of range");
            const auto src = rows_.row(id);
            std::copy(src.begin(), src.end(), out.row(i).begin());
        }
        return out;
    }

private:
    Matrix rows_;
    std::size_t dim_;
};

// Pool features whose column 0 carries the instance id at negligible scale
// (so FixedModel can look up its preset row without distorting distances);
// the remaining columns are free-form coordinates.
inline Matrix id_features(const std::vector<std::vector<double>>& coords) {
    const std::size_t extra = coords.empty() ? 0 : coords[0].size();
    Matrix m(coords.size(), extra + 1);
    for (std::size_t i = 0; i < coords.size(); ++i) {
        m(i, 0) = static_cast<double>(i) * FixedModel::kIdScale;
        for (std::size_t j = 0; j < extra; ++j) m(i, j + 1) = coords[i][j];
    }
    return m;
}

inline CalibratedModel fixed_probability_model(const std::vector<std::vector<double>>& rows,
                                               std::size_t feature_dim) {
    Matrix m(rows.size(), rows.empty() ? 0 : rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
    }
    return CalibratedModel::identity(std::make_shared<FixedModel>(std::move(m), feature_dim));
}

}  // namespace albench::testing
