#include "albench/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace albench {

namespace {
double sigmoid(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}
}  // namespace

BinaryMlp::BinaryMlp(std::size_t input_dim, std::size_t hidden, Rng& rng)
    : input_dim_(input_dim), hidden_(hidden),
      params_(hidden * input_dim + hidden + hidden + 1, 0.0) {
    const double r = 1.0 / std::sqrt(static_cast<double>(input_dim));
    for (std::size_t i = 0; i < hidden * input_dim; ++i) {
        params_[i] = (2.0 * rng.uniform_real() - 1.0) * r;
    }
    // b1, w2, b2 stay zero: initial output is exactly 0.5 for every input.
}

double BinaryMlp::forward(std::span<const double> x, std::vector<double>& hidden_out) const {
    const double* w1 = params_.data();
    const double* b1 = w1 + hidden_ * input_dim_;
    const double* w2 = b1 + hidden_;
    const double b2 = *(w2 + hidden_);

    hidden_out.resize(hidden_);
    double z = b2;
    for (std::size_t h = 0; h < hidden_; ++h) {
        double a = b1[h];
        const double* row = w1 + h * input_dim_;
        for (std::size_t j = 0; j < input_dim_; ++j) a += row[j] * x[j];
        a = a > 0.0 ? a : 0.0;
        hidden_out[h] = a;
        z += w2[h] * a;
    }
    return z;
}

double BinaryMlp::predict_one(std::span<const double> x) const {
    std::vector<double> h;
    return sigmoid(forward(x, h));
}

std::vector<double> BinaryMlp::predict(const Matrix& x) const {
    std::vector<double> out(x.rows());
    std::vector<double> h;
    for (std::size_t i = 0; i < x.rows(); ++i) out[i] = sigmoid(forward(x.row(i), h));
    return out;
}

double BinaryMlp::loss(const Matrix& x, const std::vector<double>& y) const {
    if (x.rows() != y.size() || y.empty()) throw std::invalid_argument("BinaryMlp::loss: shape mismatch");
    double total = 0.0;
    std::vector<double> h;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double z = forward(x.row(i), h);
        // numerically stable -[y log p + (1-y) log(1-p)]
        total += z >= 0.0 ? (1.0 - y[i]) * z + std::log1p(std::exp(-z))
                          : -y[i] * z + std::log1p(std::exp(z));
    }
    return total / static_cast<double>(x.rows());
}

std::vector<double> BinaryMlp::gradient(const Matrix& x, const std::vector<double>& y) const {
    if (x.rows() != y.size() || y.empty()) throw std::invalid_argument("BinaryMlp::gradient: shape mismatch");
    std::vector<double> grad(params_.size(), 0.0);
    double* gw1 = grad.data();
    double* gb1 = gw1 + hidden_ * input_dim_;
    double* gw2 = gb1 + hidden_;
    double* gb2 = gw2 + hidden_;
    const double* w2 = params_.data() + hidden_ * input_dim_ + hidden_;

    std::vector<double> h;
    const double inv_n = 1.0 / static_cast<double>(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        const double z = forward(xi, h);
        const double delta = (sigmoid(z) - y[i]) * inv_n;
        *gb2 += delta;
        for (std::size_t k = 0; k < hidden_; ++k) {
            gw2[k] += delta * h[k];
            if (h[k] > 0.0) {  // ReLU gate
                const double dh = delta * w2[k];
                gb1[k] += dh;
                double* row = gw1 + k * input_dim_;
                for (std::size_t j = 0; j < input_dim_; ++j) row[j] += dh * xi[j];
            }
        }
    }
    return grad;
}

double BinaryMlp::train_epoch(const Matrix& x, const std::vector<double>& y,
                              double learning_rate) {
    const double before = loss(x, y);
    const auto grad = gradient(x, y);
    for (std::size_t i = 0; i < params_.size(); ++i) params_[i] -= learning_rate * grad[i];
    return before;
}

void BinaryMlp::fit(const Matrix& x, const std::vector<double>& y, int epochs,
                    double learning_rate) {
    for (int e = 0; e < epochs; ++e) train_epoch(x, y, learning_rate);
}

}  // namespace albench
