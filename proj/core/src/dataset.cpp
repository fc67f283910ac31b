#include "albench/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace albench {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(cur);
    return fields;
}

double parse_double(const std::string& s, std::size_t line_no) {
    double value = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw std::runtime_error("load_table: non-numeric feature cell '" + s +
                                 "' on line " + std::to_string(line_no));
    }
    return value;
}

// Per-class index lists in ascending class order.
std::vector<std::vector<std::size_t>> group_by_class(
    const std::vector<int>& labels, int class_count) {
    std::vector<std::vector<std::size_t>> groups(class_count);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        groups[labels[i]].push_back(i);
    }
    return groups;
}

}  // namespace

void validate_bundle(const DatasetBundle& bundle) {
    if (bundle.features.rows() != bundle.labels.size()) {
        throw std::invalid_argument("bundle: feature row count != label count");
    }
    if (bundle.features.cols() == 0) {
        throw std::invalid_argument("bundle: feature dimension must be > 0");
    }
    if (bundle.class_count < 2) {
        throw std::invalid_argument("bundle: fewer than 2 classes");
    }
    std::vector<bool> seen(bundle.class_count, false);
    for (const int y : bundle.labels) {
        if (y < 0 || y >= bundle.class_count) {
            throw std::invalid_argument("bundle: label outside 0..C-1");
        }
        seen[y] = true;
    }
    for (int c = 0; c < bundle.class_count; ++c) {
        if (!seen[c]) {
            throw std::invalid_argument("bundle: class " + std::to_string(c) +
                                        " has no instances");
        }
    }
}

DatasetBundle load_table(const std::string& path, const std::string& format) {
    if (format != "csv") throw std::invalid_argument("load_table: unsupported format '" + format + "'");
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_table: cannot open " + path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("load_table: empty file " + path);
    const auto header = split_csv_line(line);
    if (header.empty() || header[0] != "label") {
        throw std::runtime_error("load_table: first header column must be 'label'");
    }
    const std::size_t dim = header.size() - 1;
    if (dim == 0) throw std::runtime_error("load_table: no feature columns");
    for (std::size_t j = 0; j < dim; ++j) {
        if (header[j + 1] != "feat_" + std::to_string(j)) {
            throw std::runtime_error("load_table: expected header column feat_" +
                                     std::to_string(j) + ", got '" + header[j + 1] + "'");
        }
    }

    DatasetBundle bundle;
    std::map<std::string, int> label_ids;
    std::vector<double> flat;
    std::size_t rows = 0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != dim + 1) {
            throw std::runtime_error("load_table: ragged row on line " +
                                     std::to_string(line_no) + " (expected " +
                                     std::to_string(dim + 1) + " fields, got " +
                                     std::to_string(fields.size()) + ")");
        }
        auto [it, inserted] = label_ids.emplace(fields[0], static_cast<int>(bundle.label_names.size()));
        if (inserted) bundle.label_names.push_back(fields[0]);
        bundle.labels.push_back(it->second);
        for (std::size_t j = 0; j < dim; ++j) {
            flat.push_back(parse_double(fields[j + 1], line_no));
        }
        ++rows;
    }
    if (bundle.label_names.size() < 2) {
        throw std::runtime_error("load_table: fewer than 2 classes in " + path);
    }

    bundle.id = path;
    const auto slash = path.find_last_of('/');
    if (slash != std::string::npos) bundle.id = path.substr(slash + 1);
    const auto dot = bundle.id.find_last_of('.');
    if (dot != std::string::npos) bundle.id = bundle.id.substr(0, dot);

    bundle.class_count = static_cast<int>(bundle.label_names.size());
    bundle.features = Matrix(rows, dim);
    std::copy(flat.begin(), flat.end(), bundle.features.row(0).begin());
    validate_bundle(bundle);
    return bundle;
}

void save_table(const DatasetBundle& bundle, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("save_table: cannot open " + path);
    out << "label";
    for (std::size_t j = 0; j < bundle.dim(); ++j) out << ",feat_" << j;
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < bundle.size(); ++i) {
        const int y = bundle.labels[i];
        if (y >= 0 && static_cast<std::size_t>(y) < bundle.label_names.size()) {
            out << bundle.label_names[y];
        } else {
            out << y;
        }
        for (const double v : bundle.features.row(i)) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << ',' << buf;
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error("save_table: write failed for " + path);
}

std::vector<std::size_t> largest_remainder_allocate(
    const std::vector<double>& quotas, std::size_t total,
    const std::vector<std::size_t>& caps) {
    const std::size_t k = quotas.size();
    std::vector<std::size_t> alloc(k, 0);
    for (std::size_t seat = 0; seat < total; ++seat) {
        std::size_t best = k;
        double best_key = -1e300;
        for (std::size_t i = 0; i < k; ++i) {
            if (alloc[i] >= caps[i]) continue;
            const double key = quotas[i] - static_cast<double>(alloc[i]);
            if (key > best_key) {
                best_key = key;
                best = i;
            }
        }
        if (best == k) break;  // everything capped
        ++alloc[best];
    }
    return alloc;
}

std::vector<std::size_t> stratified_sample_indices(const DatasetBundle& bundle,
                                                   std::size_t size, Rng& rng) {
    const std::size_t n = bundle.size();
    if (size > n) throw std::invalid_argument("stratified_sample: size exceeds population");
    if (size < static_cast<std::size_t>(bundle.class_count)) {
        throw std::invalid_argument("stratified_sample: size smaller than class count");
    }

    auto groups = group_by_class(bundle.labels, bundle.class_count);
    std::vector<double> quotas(groups.size());
    std::vector<std::size_t> caps(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
        quotas[c] = static_cast<double>(size) * static_cast<double>(groups[c].size()) /
                    static_cast<double>(n);
        caps[c] = groups[c].size();
    }
    // Seed one seat per class so the sample keeps every class, then fill the
    // rest toward the proportional quotas.
    std::vector<std::size_t> alloc(groups.size(), 1);
    std::size_t remaining = size - groups.size();
    for (std::size_t seat = 0; seat < remaining; ++seat) {
        std::size_t best = groups.size();
        double best_key = -1e300;
        for (std::size_t c = 0; c < groups.size(); ++c) {
            if (alloc[c] >= caps[c]) continue;
            const double key = quotas[c] - static_cast<double>(alloc[c]);
            if (key > best_key) {
                best_key = key;
                best = c;
            }
        }
        if (best == groups.size()) break;
        ++alloc[best];
    }

    std::vector<std::size_t> chosen;
    chosen.reserve(size);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        rng.shuffle(groups[c]);
        for (std::size_t i = 0; i < alloc[c]; ++i) chosen.push_back(groups[c][i]);
    }
    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

DatasetBundle stratified_sample(const DatasetBundle& bundle, std::size_t size,
                                Rng& rng) {
    const auto idx = stratified_sample_indices(bundle, size, rng);
    DatasetBundle out;
    out.id = bundle.id;
    out.label_names = bundle.label_names;
    out.class_count = bundle.class_count;
    out.features = bundle.features.take_rows(idx);
    out.labels.reserve(idx.size());
    for (const std::size_t i : idx) out.labels.push_back(bundle.labels[i]);
    validate_bundle(out);
    return out;
}

double label_entropy(const std::vector<int>& labels, int class_count) {
    if (labels.empty()) throw std::invalid_argument("label_entropy: empty input");
    if (class_count < 2) throw std::invalid_argument("label_entropy: class_count must be >= 2");
    std::vector<std::size_t> counts(class_count, 0);
    for (const int y : labels) {
        if (y < 0 || y >= class_count) throw std::invalid_argument("label_entropy: label outside 0..C-1");
        ++counts[y];
    }
    const double n = static_cast<double>(labels.size());
    const double log_c = std::log(static_cast<double>(class_count));
    double h = 0.0;
    for (const std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p) / log_c;
    }
    return h;
}

ValidationSplit split_validation(const std::vector<std::size_t>& labeled_indices,
                                 const std::vector<int>& labels,
                                 double fraction, Rng& rng) {
    if (labeled_indices.empty()) throw std::invalid_argument("split_validation: empty input");
    if (labeled_indices.size() != labels.size()) {
        throw std::invalid_argument("split_validation: index/label length mismatch");
    }
    if (!(fraction > 0.0 && fraction < 1.0)) {
        throw std::invalid_argument("split_validation: fraction must be in (0,1)");
    }

    int max_label = 0;
    for (const int y : labels) max_label = std::max(max_label, y);
    auto groups = group_by_class(labels, max_label + 1);  // positions into labeled_indices

    const std::size_t n = labeled_indices.size();
    const auto target = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(n)));

    std::vector<double> quotas(groups.size());
    std::vector<std::size_t> caps(groups.size());
    for (std::size_t c = 0; c < groups.size(); ++c) {
        quotas[c] = fraction * static_cast<double>(groups[c].size());
        caps[c] = groups[c].empty() ? 0 : groups[c].size() - 1;  // >=1 stays in train
    }
    const auto alloc = largest_remainder_allocate(quotas, target, caps);

    ValidationSplit split;
    for (std::size_t c = 0; c < groups.size(); ++c) {
        rng.shuffle(groups[c]);
        for (std::size_t i = 0; i < groups[c].size(); ++i) {
            const std::size_t original = labeled_indices[groups[c][i]];
            if (i < alloc[c]) {
                split.validation.push_back(original);
            } else {
                split.train.push_back(original);
            }
        }
    }
    std::sort(split.train.begin(), split.train.end());
    std::sort(split.validation.begin(), split.validation.end());
    return split;
}

DatasetBundle make_blobs(int class_count, std::size_t dim,
                         std::size_t per_class, double separation, Rng& rng) {
    if (class_count < 2) throw std::invalid_argument("make_blobs: class_count must be >= 2");
    if (dim < 1) throw std::invalid_argument("make_blobs: dim must be >= 1");
    if (per_class < 1) throw std::invalid_argument("make_blobs: per_class must be >= 1");
    if (static_cast<std::size_t>(class_count) > dim + 1) {
        throw std::invalid_argument(
            "make_blobs: cannot place " + std::to_string(class_count) +
            " equidistant class means in " + std::to_string(dim) + " dimensions");
    }

    // Scaled regular-simplex vertices: basis vectors have mutual distance
    // sqrt(2); when C == dim+1 the extra vertex b*(1,..,1) keeps that.
    const double scale = separation / std::sqrt(2.0);
    Matrix means(class_count, dim, 0.0);
    for (int c = 0; c < class_count; ++c) {
        if (static_cast<std::size_t>(c) < dim) {
            means(c, c) = scale;
        } else {
            const double beta =
                (1.0 + std::sqrt(static_cast<double>(dim) + 1.0)) / static_cast<double>(dim);
            for (std::size_t j = 0; j < dim; ++j) means(c, j) = beta * scale;
        }
    }

    DatasetBundle bundle;
    bundle.id = "blobs";
    bundle.class_count = class_count;
    bundle.features = Matrix(static_cast<std::size_t>(class_count) * per_class, dim);
    for (int c = 0; c < class_count; ++c) {
        bundle.label_names.push_back(std::to_string(c));
        for (std::size_t i = 0; i < per_class; ++i) {
            const std::size_t r = static_cast<std::size_t>(c) * per_class + i;
            bundle.labels.push_back(c);
            for (std::size_t j = 0; j < dim; ++j) {
                bundle.features(r, j) = means(c, j) + rng.gaussian();
            }
        }
    }
    validate_bundle(bundle);
    return bundle;
}

}  // namespace albench
