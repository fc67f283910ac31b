#include "albench/kmeans.hpp"

#include <limits>
#include <stdexcept>

namespace albench {

KMeansResult kmeans(const Matrix& points, std::size_t k, Rng& rng,
                    std::size_t max_iterations) {
    const std::size_t n = points.rows();
    const std::size_t d = points.cols();
    if (k == 0 || k > n) throw std::invalid_argument("kmeans: k must be in 1..n");

    // k-means++ seeding
    Matrix centroids(k, d);
    std::vector<double> dist_sq(n, std::numeric_limits<double>::max());
    {
        const std::size_t first = rng.uniform_index(n);
        std::copy(points.row(first).begin(), points.row(first).end(),
                  centroids.row(0).begin());
        for (std::size_t c = 1; c < k; ++c) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double ds = squared_distance(points.row(i), centroids.row(c - 1));
                if (ds < dist_sq[i]) dist_sq[i] = ds;
                total += dist_sq[i];
            }
            std::size_t pick = 0;
            if (total > 0.0) {
                const double target = rng.uniform_real() * total;
                double acc = 0.0;
                pick = n - 1;
                for (std::size_t i = 0; i < n; ++i) {
                    acc += dist_sq[i];
                    if (acc >= target) {
                        pick = i;
                        break;
                    }
                }
            } else {
                pick = rng.uniform_index(n);  // all points coincide with centroids
            }
            std::copy(points.row(pick).begin(), points.row(pick).end(),
                      centroids.row(c).begin());
        }
    }

    std::vector<int> assignment(n, -1);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t iter = 0; iter < max_iterations; ++iter) {
        bool changed = false;
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::max();
            for (std::size_t c = 0; c < k; ++c) {
                const double ds = squared_distance(points.row(i), centroids.row(c));
                if (ds < best_d) {
                    best_d = ds;
                    best = static_cast<int>(c);
                }
            }
            if (assignment[i] != best) {
                assignment[i] = best;
                changed = true;
            }
        }
        if (!changed) break;

        Matrix sums(k, d, 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(assignment[i]);
            ++sizes[c];
            auto row = sums.row(c);
            const auto p = points.row(i);
            for (std::size_t j = 0; j < d; ++j) row[j] += p[j];
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (sizes[c] == 0) continue;  // keep previous centroid
            auto dst = centroids.row(c);
            const auto src = sums.row(c);
            for (std::size_t j = 0; j < d; ++j) {
                dst[j] = src[j] / static_cast<double>(sizes[c]);
            }
        }
    }

    std::fill(sizes.begin(), sizes.end(), 0);
    for (const int a : assignment) ++sizes[a];
    return KMeansResult{std::move(centroids), std::move(assignment), std::move(sizes)};
}

}  // namespace albench
