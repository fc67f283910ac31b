#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "albench/calibrate.hpp"
#include "albench/matrix.hpp"
#include "albench/rng.hpp"

namespace albench {

enum class StrategyId { random, margin, cal, dal, real };

std::string to_string(StrategyId id);
StrategyId strategy_from_string(const std::string& token);
bool is_random(StrategyId id);

// Labeled / unlabeled bookkeeping for one trial. Indices refer to rows of
// the pool bundle; labels are known only for the labeled side.
struct PoolState {
    std::vector<std::size_t> labeled;
    std::vector<std::size_t> unlabeled;
    std::vector<int> labels_of_labeled;  // aligned with `labeled`

    void check_consistent() const;  // throws on overlap or misalignment
};

struct StrategyParams {
    std::size_t cal_k = 10;
    std::size_t real_clusters = 25;
    std::size_t dal_hidden = 64;
    int dal_epochs = 50;
};

// Uniform without-replacement batch.
std::vector<std::size_t> select_random(const PoolState& pool, std::size_t b, Rng& rng);

// Smallest top-two calibrated probability difference; ties by ascending index.
std::vector<std::size_t> select_margin(const CalibratedModel& model,
                                       const Matrix& features,
                                       const PoolState& pool, std::size_t b);

// Highest mean KL(neighbor || candidate) over the k nearest labeled
// neighbors in feature space.
std::vector<std::size_t> select_cal(const CalibratedModel& model,
                                    const Matrix& features, const PoolState& pool,
                                    std::size_t b, std::size_t k);

// Labeled-vs-unlabeled discriminator; picks the instances that look most
// unlabeled to it.
std::vector<std::size_t> select_dal(const Matrix& features, const PoolState& pool,
                                    std::size_t b, const StrategyParams& params,
                                    Rng& rng);

// Cluster the unlabeled pool, pseudo-label each cluster with its modal
// predicted class, then sample the disagreeing members, budget split across
// clusters proportionally to error counts.
std::vector<std::size_t> select_real(const CalibratedModel& model,
                                     const Matrix& features, const PoolState& pool,
                                     std::size_t b, const StrategyParams& params,
                                     Rng& rng);

// Route to the strategy; validates that the result has exactly b distinct
// unlabeled indices.
std::vector<std::size_t> dispatch(StrategyId strategy, const CalibratedModel& model,
                                  const Matrix& features, const PoolState& pool,
                                  std::size_t b, const StrategyParams& params,
                                  Rng& rng);

}  // namespace albench
