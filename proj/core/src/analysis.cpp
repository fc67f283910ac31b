#include "albench/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "albench/stats.hpp"

namespace albench {

Delta relative_improvement(double f_q, double f_r) {
    if (f_q < 0.0 || f_r < 0.0) {
        throw std::invalid_argument("relative_improvement: scores cannot be negative");
    }
    if (f_r == 0.0) return Delta{0.0, false};
    return Delta{100.0 * (f_q - f_r) / f_r, true};
}

std::size_t align_label_sizes(std::size_t n, const std::vector<std::size_t>& source_grid,
                              const std::vector<std::size_t>& target_grid) {
    if (source_grid.empty() || target_grid.empty()) {
        throw std::invalid_argument("align_label_sizes: empty grid");
    }
    if (!std::is_sorted(source_grid.begin(), source_grid.end()) ||
        !std::is_sorted(target_grid.begin(), target_grid.end())) {
        throw std::invalid_argument("align_label_sizes: grids must be sorted");
    }
    std::size_t best = target_grid[0];
    auto gap = [n](std::size_t t) {
        return t > n ? t - n : n - t;
    };
    for (const std::size_t t : target_grid) {
        if (gap(t) < gap(best)) best = t;  // ties keep the smaller target
    }
    return best;
}

bool RecordFilter::matches(const ImprovementRecord& r) const {
    if (pipeline && *pipeline != r.pipeline) return false;
    if (strategy && *strategy != r.strategy) return false;
    if (dataset && *dataset != r.dataset) return false;
    if (batch_seed && (batch_seed->first != r.b || batch_seed->second != r.s)) return false;
    if (n && *n != r.n) return false;
    return true;
}

double expected_improvement(const std::vector<ImprovementRecord>& records,
                            const RecordFilter& fixed) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (!r.defined || !fixed.matches(r)) continue;
        total += r.delta;
        ++count;
    }
    if (count == 0) throw std::invalid_argument("expected_improvement: no matching records");
    return total / static_cast<double>(count);
}

namespace {

double population_std(const std::vector<double>& values, double mean) {
    double acc = 0.0;
    for (const double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(values.size()));
}

}  // namespace

AlwaysOnSummary always_on_summary(const std::vector<double>& deltas) {
    if (deltas.empty()) throw std::invalid_argument("always_on_summary: empty input");

    AlwaysOnSummary out;
    std::vector<double> nonneg;
    double total = 0.0;
    std::size_t negatives = 0;
    for (const double d : deltas) {
        total += d;
        if (d < 0.0) {
            ++negatives;
        } else {
            nonneg.push_back(d);
        }
    }
    out.pct_negative = 100.0 * static_cast<double>(negatives) /
                       static_cast<double>(deltas.size());
    out.mean = total / static_cast<double>(deltas.size());
    out.stddev = population_std(deltas, out.mean);
    if (!nonneg.empty()) {
        double m = 0.0;
        for (const double d : nonneg) m += d;
        m /= static_cast<double>(nonneg.size());
        out.mean_nonneg = m;
        out.std_nonneg = population_std(nonneg, m);
    }
    return out;
}

std::map<std::size_t, double> variance_profile(const std::vector<ScoreCell>& cells) {
    // (pipeline, dataset, n) -> per-strategy means
    std::map<std::tuple<std::string, std::string, std::size_t>, std::vector<double>> groups;
    for (const auto& c : cells) {
        groups[{c.pipeline, c.dataset, c.n}].push_back(c.mean_f1);
    }
    std::map<std::size_t, std::pair<double, std::size_t>> acc;  // n -> (sum var, count)
    for (const auto& [key, values] : groups) {
        if (values.size() < 2) {
            throw std::invalid_argument(
                "variance_profile: needs >= 2 strategies per (pipeline, dataset, n) cell");
        }
        double mean = 0.0;
        for (const double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        for (const double v : values) var += (v - mean) * (v - mean);
        var /= static_cast<double>(values.size());
        auto& slot = acc[std::get<2>(key)];
        slot.first += var;
        slot.second += 1;
    }
    std::map<std::size_t, double> out;
    for (const auto& [n, slot] : acc) out[n] = slot.first / static_cast<double>(slot.second);
    return out;
}

std::map<std::size_t, double> variance_profile(const std::vector<RunRecord>& runs) {
    // mean over trials first
    std::map<std::tuple<std::string, std::string, std::string, std::size_t>,
             std::pair<double, std::size_t>>
        sums;
    for (const auto& run : runs) {
        for (const auto& e : run.entries) {
            auto& slot = sums[{run.config.pipeline.id, run.config.dataset_id,
                               to_string(run.config.strategy), e.n}];
            slot.first += e.f1;
            slot.second += 1;
        }
    }
    std::vector<ScoreCell> cells;
    cells.reserve(sums.size());
    for (const auto& [key, slot] : sums) {
        cells.push_back(ScoreCell{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                  std::get<3>(key),
                                  slot.first / static_cast<double>(slot.second)});
    }
    return variance_profile(cells);
}

WilcoxonResult wilcoxon_signed_rank(const std::vector<double>& x,
                                    const std::vector<double>& y,
                                    Alternative alternative) {
    if (x.size() != y.size() || x.empty()) {
        throw std::invalid_argument("wilcoxon_signed_rank: paired lists of equal length required");
    }
    std::vector<double> diffs;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        if (d != 0.0) diffs.push_back(d);
    }
    if (diffs.empty()) {
        throw std::invalid_argument("wilcoxon_signed_rank: all differences are zero");
    }

    const std::size_t n = diffs.size();
    std::vector<double> abs_diffs(n);
    for (std::size_t i = 0; i < n; ++i) abs_diffs[i] = std::abs(diffs[i]);
    const auto ranks = rank_with_ties(abs_diffs);

    double w_plus = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (diffs[i] > 0.0) w_plus += ranks[i];
    }

    WilcoxonResult result;
    result.statistic = w_plus;
    result.n_effective = n;

    const bool tie_free = [&] {
        std::vector<double> sorted = abs_diffs;
        std::sort(sorted.begin(), sorted.end());
        return std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end();
    }();

    if (n <= 12 && tie_free) {
        // full enumeration over the 2^n sign assignments; ranks are 1..n
        result.exact = true;
        const std::size_t count = std::size_t{1} << n;
        const auto w = static_cast<std::size_t>(std::llround(w_plus));
        std::size_t at_or_above = 0, at_or_below = 0;
        for (std::size_t mask = 0; mask < count; ++mask) {
            std::size_t sum = 0;
            for (std::size_t i = 0; i < n; ++i) {
                if (mask & (std::size_t{1} << i)) sum += i + 1;
            }
            if (sum >= w) ++at_or_above;
            if (sum <= w) ++at_or_below;
        }
        const double total = static_cast<double>(count);
        const double p_greater = static_cast<double>(at_or_above) / total;
        const double p_less = static_cast<double>(at_or_below) / total;
        switch (alternative) {
            case Alternative::greater: result.p_value = p_greater; break;
            case Alternative::less: result.p_value = p_less; break;
            case Alternative::two_sided:
                result.p_value = std::min(1.0, 2.0 * std::min(p_greater, p_less));
                break;
        }
        return result;
    }

    // Normal approximation with tie and continuity corrections.
    const double dn = static_cast<double>(n);
    const double mu = dn * (dn + 1.0) / 4.0;
    const double tie_term = tie_correction_term(ranks);
    const double sigma = std::sqrt(dn * (dn + 1.0) * (2.0 * dn + 1.0) / 24.0 - tie_term / 48.0);
    switch (alternative) {
        case Alternative::greater:
            result.p_value = 1.0 - normal_cdf((w_plus - mu - 0.5) / sigma);
            break;
        case Alternative::less:
            result.p_value = normal_cdf((w_plus - mu + 0.5) / sigma);
            break;
        case Alternative::two_sided: {
            const double z = (std::abs(w_plus - mu) - 0.5) / sigma;
            result.p_value = std::min(1.0, 2.0 * (1.0 - normal_cdf(z)));
            break;
        }
    }
    result.p_value = std::clamp(result.p_value, 0.0, 1.0);
    return result;
}

RankMatrix rank_blocks(const std::vector<std::vector<double>>& values) {
    RankMatrix out;
    out.ranks.reserve(values.size());
    std::size_t k = values.empty() ? 0 : values[0].size();
    for (const auto& row : values) {
        if (row.size() != k) throw std::invalid_argument("rank_blocks: ragged blocks");
        out.ranks.push_back(rank_with_ties(row));
    }
    return out;
}

FriedmanResult friedman_test(const std::vector<std::vector<double>>& blocks) {
    const std::size_t n = blocks.size();
    const std::size_t k = n > 0 ? blocks[0].size() : 0;
    if (n < 2 || k < 2) {
        throw std::invalid_argument("friedman_test: needs >= 2 blocks and >= 2 treatments");
    }
    const RankMatrix ranked = rank_blocks(blocks);

    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    std::vector<double> rank_sums(k, 0.0);
    double sum_sq_ranks = 0.0;
    for (const auto& row : ranked.ranks) {
        for (std::size_t j = 0; j < k; ++j) {
            rank_sums[j] += row[j];
            sum_sq_ranks += row[j] * row[j];
        }
    }
    double sum_sq_colsums = 0.0;
    for (const double r : rank_sums) sum_sq_colsums += r * r;

    // tie-corrected statistic; reduces to
    // 12/(n k (k+1)) * sum R_j^2 - 3 n (k+1) without ties
    const double numerator = (dk - 1.0) * (sum_sq_colsums - dn * dn * dk * (dk + 1.0) * (dk + 1.0) / 4.0);
    const double denominator = sum_sq_ranks - dn * dk * (dk + 1.0) * (dk + 1.0) / 4.0;

    FriedmanResult result;
    result.df = static_cast<int>(k) - 1;
    if (denominator <= 0.0) {
        result.chi2 = 0.0;  // every block fully tied
        result.p_value = 1.0;
        return result;
    }
    result.chi2 = numerator / denominator;
    result.p_value = chi_squared_sf(result.chi2, static_cast<double>(result.df));
    return result;
}

double kendalls_w(const std::vector<std::vector<double>>& blocks) {
    const std::size_t m = blocks.size();
    const std::size_t k = m > 0 ? blocks[0].size() : 0;
    if (m < 2 || k < 2) {
        throw std::invalid_argument("kendalls_w: needs >= 2 judges and >= 2 items");
    }
    const RankMatrix ranked = rank_blocks(blocks);

    const double dm = static_cast<double>(m);
    const double dk = static_cast<double>(k);
    std::vector<double> rank_sums(k, 0.0);
    double tie_total = 0.0;
    for (const auto& row : ranked.ranks) {
        for (std::size_t j = 0; j < k; ++j) rank_sums[j] += row[j];
        tie_total += tie_correction_term(row);
    }
    const double mean_sum = dm * (dk + 1.0) / 2.0;
    double s = 0.0;
    for (const double r : rank_sums) s += (r - mean_sum) * (r - mean_sum);

    const double denominator = dm * dm * (dk * dk * dk - dk) - dm * tie_total;
    if (denominator <= 0.0) return 0.0;  // every judge fully tied
    return 12.0 * s / denominator;
}

std::pair<std::vector<std::vector<double>>, std::vector<std::string>> matched_blocks(
    const std::vector<ImprovementRecord>& records, TreatmentAxis axis) {
    const auto treatment_of = [axis](const ImprovementRecord& r) {
        return axis == TreatmentAxis::strategy ? to_string(r.strategy) : r.pipeline;
    };
    std::set<std::string> treatment_set;
    for (const auto& r : records) {
        if (r.defined) treatment_set.insert(treatment_of(r));
    }
    std::vector<std::string> treatments(treatment_set.begin(), treatment_set.end());

    using BlockKey = std::tuple<std::string, std::string, std::size_t, std::size_t, int, std::size_t>;
    const auto block_of = [axis](const ImprovementRecord& r) {
        return BlockKey{axis == TreatmentAxis::strategy ? r.pipeline : to_string(r.strategy),
                        r.dataset, r.b, r.s, r.trial, r.n};
    };

    std::map<BlockKey, std::map<std::string, double>> blocks;
    for (const auto& r : records) {
        if (!r.defined) continue;
        auto& block = blocks[block_of(r)];
        if (!block.emplace(treatment_of(r), r.delta).second) {
            throw std::logic_error("matched_blocks: duplicate observation in a block");
        }
    }

    std::vector<std::vector<double>> values;
    for (const auto& [key, block] : blocks) {
        (void)key;
        if (block.size() != treatments.size()) continue;  // incomplete block
        std::vector<double> row;
        row.reserve(treatments.size());
        for (const auto& t : treatments) row.push_back(block.at(t));
        values.push_back(std::move(row));
    }
    return {std::move(values), std::move(treatments)};
}

std::vector<std::size_t> alignment_target_grid(const ResultsTable& table) {
    std::size_t max_b = 0;
    for (const auto& r : table.rows) {
        if (!r.is_error()) max_b = std::max(max_b, r.b);
    }
    std::set<std::size_t> grid;
    for (const auto& r : table.rows) {
        if (!r.is_error() && r.b == max_b) grid.insert(r.n);
    }
    if (grid.empty()) throw std::invalid_argument("alignment_target_grid: no score rows");
    return {grid.begin(), grid.end()};
}

std::vector<ImprovementRecord> improvement_records(const ResultsTable& table) {
    const auto target_grid = alignment_target_grid(table);

    // source grids per (b, s)
    std::map<std::pair<std::size_t, std::size_t>, std::set<std::size_t>> source_sets;
    for (const auto& r : table.rows) {
        if (!r.is_error()) source_sets[{r.b, r.s}].insert(r.n);
    }
    std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> source_grids;
    for (const auto& [key, set] : source_sets) {
        source_grids[key] = {set.begin(), set.end()};
    }

    // random baselines keyed by (dataset, pipeline, b, s, trial, n)
    using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, int, std::size_t>;
    std::map<Key, double> baseline;
    for (const auto& r : table.rows) {
        if (r.is_error() || r.strategy != "random") continue;
        baseline[{r.dataset, r.pipeline, r.b, r.s, r.trial, r.n}] = r.f1;
    }

    std::vector<ImprovementRecord> out;
    for (const auto& r : table.rows) {
        if (r.is_error() || r.strategy == "random") continue;
        const auto it = baseline.find({r.dataset, r.pipeline, r.b, r.s, r.trial, r.n});
        if (it == baseline.end()) {
            throw std::runtime_error("improvement_records: missing random baseline for dataset=" +
                                     r.dataset + " pipeline=" + r.pipeline + " b=" +
                                     std::to_string(r.b) + " s=" + std::to_string(r.s));
        }
        const Delta delta = relative_improvement(r.f1, it->second);
        ImprovementRecord rec;
        rec.pipeline = r.pipeline;
        rec.strategy = strategy_from_string(r.strategy);
        rec.dataset = r.dataset;
        rec.b = r.b;
        rec.s = r.s;
        rec.trial = r.trial;
        rec.n = align_label_sizes(r.n, source_grids.at({r.b, r.s}), target_grid);
        rec.delta = delta.value;
        rec.defined = delta.defined;
        out.push_back(std::move(rec));
    }
    return out;
}

}  // namespace albench
