#pragma once

#include <cstdint>
#include <vector>

#include "albench/matrix.hpp"
#include "albench/rng.hpp"

namespace albench {

// One-hidden-layer binary discriminator (ReLU hidden, logistic output),
// trained full-batch on cross-entropy. The output layer starts at zero so an
// untrained net predicts exactly 0.5 everywhere.
class BinaryMlp {
public:
    BinaryMlp(std::size_t input_dim, std::size_t hidden, Rng& rng);

    double predict_one(std::span<const double> x) const;
    std::vector<double> predict(const Matrix& x) const;

    // Mean binary cross-entropy over (x, y) with y in {0, 1}.
    double loss(const Matrix& x, const std::vector<double>& y) const;

    // One full-batch gradient step; returns the loss before the step.
    double train_epoch(const Matrix& x, const std::vector<double>& y, double learning_rate);

    void fit(const Matrix& x, const std::vector<double>& y, int epochs, double learning_rate);

    // Flat parameter access used by the finite-difference tests.
    std::vector<double>& parameters() { return params_; }
    const std::vector<double>& parameters() const { return params_; }
    std::vector<double> gradient(const Matrix& x, const std::vector<double>& y) const;

private:
    std::size_t input_dim_;
    std::size_t hidden_;
    // layout: W1 (hidden x input), b1 (hidden), w2 (hidden), b2
    std::vector<double> params_;

    double forward(std::span<const double> x, std::vector<double>& hidden_out) const;
};

}  // namespace albench
