#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "albench/matrix.hpp"
#include "albench/rng.hpp"

namespace albench {

// One classification dataset: the universe a trial draws from.
struct DatasetBundle {
    std::string id;
    Matrix features;              // rows = instances
    std::vector<int> labels;      // dense class ids in 0..class_count-1
    int class_count = 0;
    // Original label strings by class id, kept for readable reports.
    std::vector<std::string> label_names;

    std::size_t size() const { return labels.size(); }
    std::size_t dim() const { return features.cols(); }
};

// Pool / test / validation sizing.
struct SplitSpec {
    std::size_t pool_size = 20000;
    std::size_t test_size = 5000;
    double validation_fraction = 0.2;
};

// Throws std::invalid_argument when a bundle invariant is violated.
void validate_bundle(const DatasetBundle& bundle);

// CSV with header `label,feat_0..feat_{d-1}`; labels re-encoded densely in
// first-appearance order. "csv" is the only supported format.
DatasetBundle load_table(const std::string& path, const std::string& format = "csv");
void save_table(const DatasetBundle& bundle, const std::string& path);

// Greedy largest-remainder seat allocation with per-bucket caps. Buckets are
// filled one seat at a time toward their quota, ties by ascending bucket id.
// Stops early if every bucket is capped.
std::vector<std::size_t> largest_remainder_allocate(
    const std::vector<double>& quotas, std::size_t total,
    const std::vector<std::size_t>& caps);

// Row indices (ascending) of a label-stratified sample. Every class keeps at
// least one representative.
std::vector<std::size_t> stratified_sample_indices(const DatasetBundle& bundle,
                                                   std::size_t size, Rng& rng);
DatasetBundle stratified_sample(const DatasetBundle& bundle, std::size_t size,
                                Rng& rng);

// Base-|C| entropy of the empirical class distribution, in [0, 1].
double label_entropy(const std::vector<int>& labels, int class_count);

struct ValidationSplit {
    std::vector<std::size_t> train;
    std::vector<std::size_t> validation;
};

// Label-stratified validation split. Every class with >=2 members keeps at
// least one member in train; single-member classes stay in train entirely.
// `labels[i]` is the class of `labeled_indices[i]`.
ValidationSplit split_validation(const std::vector<std::size_t>& labeled_indices,
                                 const std::vector<int>& labels,
                                 double fraction, Rng& rng);

// Gaussian clusters with unit variance and class means at mutual distance
// `separation`. Requires class_count <= dim + 1 so the means can be placed
// equidistantly.
DatasetBundle make_blobs(int class_count, std::size_t dim,
                         std::size_t per_class, double separation, Rng& rng);

}  // namespace albench
