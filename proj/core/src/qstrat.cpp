#include "albench/qstrat.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "albench/dataset.hpp"
#include "albench/kmeans.hpp"
#include "albench/mlp.hpp"

namespace albench {

std::string to_string(StrategyId id) {
    switch (id) {
        case StrategyId::random: return "random";
        case StrategyId::margin: return "margin";
        case StrategyId::cal: return "cal";
        case StrategyId::dal: return "dal";
        case StrategyId::real: return "real";
    }
    return "?";
}

StrategyId strategy_from_string(const std::string& token) {
    if (token == "random") return StrategyId::random;
    if (token == "margin") return StrategyId::margin;
    if (token == "cal") return StrategyId::cal;
    if (token == "dal") return StrategyId::dal;
    if (token == "real") return StrategyId::real;
    throw std::invalid_argument("unknown strategy '" + token + "'");
}

bool is_random(StrategyId id) { return id == StrategyId::random; }

void PoolState::check_consistent() const {
    if (labeled.size() != labels_of_labeled.size()) {
        throw std::invalid_argument("PoolState: labeled/labels misaligned");
    }
    std::unordered_set<std::size_t> seen(labeled.begin(), labeled.end());
    if (seen.size() != labeled.size()) {
        throw std::invalid_argument("PoolState: duplicate labeled index");
    }
    for (const std::size_t u : unlabeled) {
        if (seen.count(u)) throw std::invalid_argument("PoolState: labeled/unlabeled overlap");
    }
}

namespace {

void check_batch(const PoolState& pool, std::size_t b) {
    if (b > pool.unlabeled.size()) {
        throw std::invalid_argument("batch size exceeds unlabeled pool");
    }
}

// b indices with the smallest key; key ties broken by ascending pool index.
std::vector<std::size_t> take_smallest(const std::vector<std::size_t>& indices,
                                       const std::vector<double>& keys, std::size_t b) {
    std::vector<std::size_t> order(indices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t c) {
        if (keys[a] != keys[c]) return keys[a] < keys[c];
        return indices[a] < indices[c];
    });
    std::vector<std::size_t> out;
    out.reserve(b);
    for (std::size_t i = 0; i < b; ++i) out.push_back(indices[order[i]]);
    return out;
}

double floored_log(double p) { return std::log(std::max(p, 1e-12)); }

// KL(p || q) with probabilities floored inside the logarithms.
double kl_divergence(std::span<const double> p, std::span<const double> q) {
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] > 0.0) kl += p[i] * (floored_log(p[i]) - floored_log(q[i]));
    }
    return kl;
}

// Margin key: difference between the two largest entries.
double top_two_margin(std::span<const double> row) {
    double first = -1.0, second = -1.0;
    for (const double v : row) {
        if (v > first) {
            second = first;
            first = v;
        } else if (v > second) {
            second = v;
        }
    }
    return first - second;
}

}  // namespace

std::vector<std::size_t> select_random(const PoolState& pool, std::size_t b, Rng& rng) {
    check_batch(pool, b);
    std::vector<std::size_t> candidates = pool.unlabeled;
    std::sort(candidates.begin(), candidates.end());
    for (std::size_t i = 0; i < b && i + 1 < candidates.size(); ++i) {
        std::swap(candidates[i], candidates[i + rng.uniform_index(candidates.size() - i)]);
    }
    candidates.resize(b);
    return candidates;
}

std::vector<std::size_t> select_margin(const CalibratedModel& model,
                                       const Matrix& features,
                                       const PoolState& pool, std::size_t b) {
    check_batch(pool, b);
    if (model.class_count() < 2) throw std::invalid_argument("select_margin: needs >= 2 classes");
    const Matrix proba = model.predict_proba(features.take_rows(pool.unlabeled));
    std::vector<double> margins(pool.unlabeled.size());
    for (std::size_t i = 0; i < margins.size(); ++i) margins[i] = top_two_margin(proba.row(i));
    return take_smallest(pool.unlabeled, margins, b);
}

std::vector<std::size_t> select_cal(const CalibratedModel& model,
                                    const Matrix& features, const PoolState& pool,
                                    std::size_t b, std::size_t k) {
    check_batch(pool, b);
    if (pool.labeled.empty()) throw std::invalid_argument("select_cal: empty labeled set");
    if (k == 0) throw std::invalid_argument("select_cal: k must be positive");
    k = std::min(k, pool.labeled.size());

    const Matrix unl_proba = model.predict_proba(features.take_rows(pool.unlabeled));
    const Matrix lab_proba = model.predict_proba(features.take_rows(pool.labeled));

    std::vector<double> scores(pool.unlabeled.size());
    std::vector<std::pair<double, std::size_t>> dist(pool.labeled.size());
    for (std::size_t u = 0; u < pool.unlabeled.size(); ++u) {
        const auto xu = features.row(pool.unlabeled[u]);
        for (std::size_t l = 0; l < pool.labeled.size(); ++l) {
            dist[l] = {squared_distance(xu, features.row(pool.labeled[l])), l};
        }
        // distance ties broken by ascending pool index
        std::partial_sort(dist.begin(), dist.begin() + k, dist.end(),
                          [&](const auto& a, const auto& c) {
                              if (a.first != c.first) return a.first < c.first;
                              return pool.labeled[a.second] < pool.labeled[c.second];
                          });

        double total = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            total += kl_divergence(lab_proba.row(dist[j].second), unl_proba.row(u));
        }
        scores[u] = -(total / static_cast<double>(k));  // negate: we want the largest
    }
    return take_smallest(pool.unlabeled, scores, b);
}

std::vector<std::size_t> select_dal(const Matrix& features, const PoolState& pool,
                                    std::size_t b, const StrategyParams& params,
                                    Rng& rng) {
    check_batch(pool, b);
    if (pool.labeled.empty()) throw std::invalid_argument("select_dal: empty labeled set");
    if (params.dal_hidden == 0) throw std::invalid_argument("select_dal: hidden width must be positive");

    const std::size_t n = pool.labeled.size() + pool.unlabeled.size();
    const std::size_t d = features.cols();

    // Standardize over the whole pool so the step size works at any feature scale.
    std::vector<double> mean(d, 0.0), sd(d, 0.0);
    auto accumulate = [&](const std::vector<std::size_t>& idx) {
        for (const std::size_t i : idx) {
            const auto x = features.row(i);
            for (std::size_t j = 0; j < d; ++j) mean[j] += x[j];
        }
    };
    accumulate(pool.labeled);
    accumulate(pool.unlabeled);
    for (double& m : mean) m /= static_cast<double>(n);
    auto accumulate_var = [&](const std::vector<std::size_t>& idx) {
        for (const std::size_t i : idx) {
            const auto x = features.row(i);
            for (std::size_t j = 0; j < d; ++j) {
                const double c = x[j] - mean[j];
                sd[j] += c * c;
            }
        }
    };
    accumulate_var(pool.labeled);
    accumulate_var(pool.unlabeled);
    for (double& s : sd) s = std::max(std::sqrt(s / static_cast<double>(n)), 1e-12);

    Matrix x(n, d);
    std::vector<double> y(n);
    std::size_t row = 0;
    for (const std::size_t i : pool.labeled) {
        const auto src = features.row(i);
        for (std::size_t j = 0; j < d; ++j) x(row, j) = (src[j] - mean[j]) / sd[j];
        y[row++] = 0.0;
    }
    for (const std::size_t i : pool.unlabeled) {
        const auto src = features.row(i);
        for (std::size_t j = 0; j < d; ++j) x(row, j) = (src[j] - mean[j]) / sd[j];
        y[row++] = 1.0;
    }

    BinaryMlp net(d, params.dal_hidden, rng);
    net.fit(x, y, params.dal_epochs, 0.1);

    std::vector<double> keys(pool.unlabeled.size());
    for (std::size_t u = 0; u < pool.unlabeled.size(); ++u) {
        keys[u] = -net.predict_one(x.row(pool.labeled.size() + u));
    }
    return take_smallest(pool.unlabeled, keys, b);
}

std::vector<std::size_t> select_real(const CalibratedModel& model,
                                     const Matrix& features, const PoolState& poolstate,
                                     std::size_t b, const StrategyParams& params,
                                     Rng& rng) {
    check_batch(poolstate, b);
    if (b == 0) return {};
    if (params.real_clusters == 0) throw std::invalid_argument("select_real: clusters must be positive");

    // Canonical ascending-index order: clustering then depends only on the
    // unlabeled set, not on how the pool state happens to list it.
    PoolState pool = poolstate;
    std::sort(pool.unlabeled.begin(), pool.unlabeled.end());

    const std::size_t k = std::min(params.real_clusters, pool.unlabeled.size());
    const Matrix unl_features = features.take_rows(pool.unlabeled);
    const auto clusters = kmeans(unl_features, k, rng);

    const Matrix proba = model.predict_proba(unl_features);
    const int class_count = model.class_count();
    std::vector<int> predicted(proba.rows());
    for (std::size_t i = 0; i < proba.rows(); ++i) {
        const auto row = proba.row(i);
        predicted[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin());
    }

    // Pseudo-label per cluster: modal predicted class, ties to the smaller id.
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < predicted.size(); ++i) {
        members[clusters.assignment[i]].push_back(i);
    }
    std::vector<int> pseudo(k, 0);
    for (std::size_t c = 0; c < k; ++c) {
        std::vector<std::size_t> votes(class_count, 0);
        for (const std::size_t i : members[c]) ++votes[predicted[i]];
        pseudo[c] = static_cast<int>(
            std::max_element(votes.begin(), votes.end()) - votes.begin());
    }

    // Disagreeing members, ranked within a cluster by descending confidence
    // in their own (disagreeing) class; ties by ascending pool index.
    std::vector<std::vector<std::size_t>> errors(k);
    std::size_t total_errors = 0;
    for (std::size_t c = 0; c < k; ++c) {
        auto& errs = errors[c];
        for (const std::size_t i : members[c]) {
            if (predicted[i] != pseudo[c]) errs.push_back(i);
        }
        std::sort(errs.begin(), errs.end(), [&](std::size_t a, std::size_t z) {
            const double pa = proba(a, predicted[a]);
            const double pz = proba(z, predicted[z]);
            if (pa != pz) return pa > pz;
            return pool.unlabeled[a] < pool.unlabeled[z];
        });
        total_errors += errs.size();
    }

    std::vector<std::size_t> chosen;  // positions into pool.unlabeled
    chosen.reserve(b);
    if (total_errors > 0) {
        const std::size_t from_errors = std::min(b, total_errors);
        std::vector<double> quotas(k);
        std::vector<std::size_t> caps(k);
        for (std::size_t c = 0; c < k; ++c) {
            quotas[c] = static_cast<double>(from_errors) *
                        static_cast<double>(errors[c].size()) /
                        static_cast<double>(total_errors);
            caps[c] = errors[c].size();
        }
        const auto alloc = largest_remainder_allocate(quotas, from_errors, caps);
        for (std::size_t c = 0; c < k; ++c) {
            for (std::size_t i = 0; i < alloc[c]; ++i) chosen.push_back(errors[c][i]);
        }
    }

    if (chosen.size() < b) {
        // Fill the remainder by smallest margin among the rest of the pool.
        std::vector<bool> taken(pool.unlabeled.size(), false);
        for (const std::size_t i : chosen) taken[i] = true;
        std::vector<std::size_t> rest;
        std::vector<double> keys;
        for (std::size_t i = 0; i < pool.unlabeled.size(); ++i) {
            if (taken[i]) continue;
            rest.push_back(i);
            keys.push_back(top_two_margin(proba.row(i)));
        }
        std::vector<std::size_t> rest_pool(rest.size());
        for (std::size_t i = 0; i < rest.size(); ++i) rest_pool[i] = pool.unlabeled[rest[i]];
        const auto extra = take_smallest(rest_pool, keys, b - chosen.size());
        std::vector<std::size_t> out;
        out.reserve(b);
        for (const std::size_t i : chosen) out.push_back(pool.unlabeled[i]);
        out.insert(out.end(), extra.begin(), extra.end());
        std::sort(out.begin(), out.end());
        return out;
    }

    std::vector<std::size_t> out;
    out.reserve(b);
    for (const std::size_t i : chosen) out.push_back(pool.unlabeled[i]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::size_t> dispatch(StrategyId strategy, const CalibratedModel& model,
                                  const Matrix& features, const PoolState& pool,
                                  std::size_t b, const StrategyParams& params,
                                  Rng& rng) {
    std::vector<std::size_t> batch;
    switch (strategy) {
        case StrategyId::random: batch = select_random(pool, b, rng); break;
        case StrategyId::margin: batch = select_margin(model, features, pool, b); break;
        case StrategyId::cal: batch = select_cal(model, features, pool, b, params.cal_k); break;
        case StrategyId::dal: batch = select_dal(features, pool, b, params, rng); break;
        case StrategyId::real: batch = select_real(model, features, pool, b, params, rng); break;
    }
    if (batch.size() != b) throw std::logic_error("dispatch: strategy returned wrong batch size");
    std::unordered_set<std::size_t> unlabeled(pool.unlabeled.begin(), pool.unlabeled.end());
    std::unordered_set<std::size_t> seen;
    for (const std::size_t i : batch) {
        if (!unlabeled.count(i)) throw std::logic_error("dispatch: selected index not unlabeled");
        if (!seen.insert(i).second) throw std::logic_error("dispatch: duplicate selection");
    }
    return batch;
}

}  // namespace albench
