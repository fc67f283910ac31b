#pragma once

#include <cstdint>
#include <vector>

#include "albench/matrix.hpp"
#include "albench/rng.hpp"

namespace albench {

struct KMeansResult {
    Matrix centroids;                    // k x dim
    std::vector<int> assignment;         // per input row
    std::vector<std::size_t> cluster_sizes;
};

// Lloyd's algorithm with k-means++ seeding. Assignment ties go to the lower
// centroid index; clusters that empty out keep their previous centroid.
KMeansResult kmeans(const Matrix& points, std::size_t k, Rng& rng,
                    std::size_t max_iterations = 100);

}  // namespace albench
