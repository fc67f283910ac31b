#include <doctest.h>

#include <set>

#include "albench/dataset.hpp"
#include "albench/loop.hpp"
#include "albench/rng.hpp"

using namespace albench;

namespace {

ExperimentConfig base_config(std::size_t b, std::size_t s, std::size_t max_labeled,
                             std::uint64_t seed) {
    ExperimentConfig config;
    config.dataset_id = "blobs";
    config.pipeline = make_pipeline("linear");
    config.pipeline.grid.linear_c = {1.0};  // singleton grid keeps trials fast
    config.strategy = StrategyId::random;
    config.batch_size = b;
    config.seed_size = s;
    config.max_labeled = max_labeled;
    config.trial_seed = seed;
    return config;
}

struct EntrySnapshot {
    int iteration;
    std::size_t n;
    double f1;
    std::string hyperparams;
    bool fallback;

    bool operator==(const EntrySnapshot&) const = default;
};

std::vector<EntrySnapshot> snapshot(const RunRecord& record) {
    std::vector<EntrySnapshot> out;
    for (const auto& e : record.entries) {
        out.push_back({e.iteration, e.n, e.f1, e.hyperparams, e.calibration_fallback});
    }
    return out;
}

}  // namespace

TEST_CASE("run_trial bookkeeping at the full-scale settings") {
    Rng rng(1001);
    const auto pool = make_blobs(2, 2, 2600, 6.0, rng);  // 5200 instances
    const auto test = make_blobs(2, 2, 150, 6.0, rng);

    SUBCASE("b = s = 200 gives 24 querying iterations and 25 scores") {
        auto config = base_config(200, 200, 5000, 7);
        CHECK(config.iterations() == 24);

        std::vector<std::size_t> labeled_sizes;
        std::set<std::size_t> previous_labeled;
        const auto record = run_trial(config, pool, test, [&](int t, const PoolState& p) {
            labeled_sizes.push_back(p.labeled.size());
            CHECK(p.labeled.size() + p.unlabeled.size() == pool.size());
            CHECK(p.labeled.size() == 200 + static_cast<std::size_t>(t) * 200);
            // monotone growth: everything labeled before stays labeled
            const std::set<std::size_t> current(p.labeled.begin(), p.labeled.end());
            for (const auto i : previous_labeled) CHECK(current.count(i) == 1);
            previous_labeled = current;
        });
        CHECK(record.entries.size() == 25);
        CHECK(labeled_sizes.size() == 25);
        for (std::size_t t = 0; t < record.entries.size(); ++t) {
            CHECK(record.entries[t].iteration == static_cast<int>(t));
            CHECK(record.entries[t].n == 200 + t * 200);
        }
        CHECK(record.final_labeled.size() == 5000);
    }

    SUBCASE("b = s = 500 gives T = 9") {
        auto config = base_config(500, 500, 5000, 7);
        CHECK(config.iterations() == 9);
        const auto record = run_trial(config, pool, test);
        CHECK(record.entries.size() == 10);
    }

    SUBCASE("non-integer T is rejected") {
        auto config = base_config(300, 250, 5000, 7);
        CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    }
}

TEST_CASE("run_trial is deterministic and seed-sensitive") {
    Rng rng(2002);
    const auto pool = make_blobs(2, 3, 120, 1.5, rng);
    const auto test = make_blobs(2, 3, 120, 1.5, rng);

    SUBCASE("identical configs produce bit-identical records") {
        const auto config = base_config(10, 10, 40, 99);
        const auto a = run_trial(config, pool, test);
        const auto b = run_trial(config, pool, test);
        CHECK(snapshot(a) == snapshot(b));
        CHECK(a.final_labeled == b.final_labeled);
        CHECK(a.reseeded == b.reseeded);
    }

    SUBCASE("different trial seeds give different final scores under random") {
        const auto a = run_trial(base_config(10, 10, 40, 1), pool, test);
        const auto b = run_trial(base_config(10, 10, 40, 2), pool, test);
        CHECK(a.entries.back().f1 != b.entries.back().f1);
    }
}

TEST_CASE("run_trial preconditions") {
    Rng rng(3003);
    const auto pool = make_blobs(2, 2, 30, 4.0, rng);
    const auto test = make_blobs(2, 2, 20, 4.0, rng);

    SUBCASE("pool smaller than max_labeled") {
        CHECK_THROWS_AS(run_trial(base_config(10, 10, 100, 1), pool, test),
                        std::invalid_argument);
    }
    SUBCASE("empty test set") {
        DatasetBundle empty;
        empty.class_count = 2;
        empty.label_names = {"0", "1"};
        empty.features = Matrix(0, 2);
        CHECK_THROWS_AS(run_trial(base_config(10, 10, 40, 1), pool, empty),
                        std::invalid_argument);
    }
}

TEST_CASE("oracle_label") {
    Rng rng(4004);
    const auto bundle = make_blobs(3, 3, 5, 2.0, rng);

    SUBCASE("returns stored labels") {
        CHECK(oracle_label({0, 5, 10}, bundle) == std::vector<int>{0, 1, 2});
    }
    SUBCASE("repeated queries answer identically") {
        CHECK(oracle_label({3, 3, 3}, bundle) == oracle_label({3, 3, 3}, bundle));
    }
    SUBCASE("out-of-range index throws") {
        CHECK_THROWS_AS(oracle_label({15}, bundle), std::out_of_range);
    }
}

TEST_CASE("single-class seed sets trigger one reseed, then an error") {
    // 198 instances of class 0, 2 of class 1: small seed draws are usually
    // single-class
    DatasetBundle pool;
    pool.id = "skew";
    pool.class_count = 2;
    pool.label_names = {"0", "1"};
    pool.features = Matrix(200, 2);
    Rng rng(5005);
    for (std::size_t i = 0; i < 200; ++i) {
        const int label = i < 198 ? 0 : 1;
        pool.features(i, 0) = label * 4.0 + rng.gaussian();
        pool.features(i, 1) = rng.gaussian();
        pool.labels.push_back(label);
    }
    Rng trng(5006);
    const auto test = make_blobs(2, 2, 20, 4.0, trng);

    bool saw_reseed_success = false;
    bool saw_reseed_failure = false;
    for (std::uint64_t seed = 0; seed < 400 && !(saw_reseed_success && saw_reseed_failure);
         ++seed) {
        auto config = base_config(5, 5, 10, seed);
        try {
            const auto record = run_trial(config, pool, test);
            if (record.reseeded) saw_reseed_success = true;
        } catch (const std::runtime_error&) {
            saw_reseed_failure = true;
        }
    }
    CHECK(saw_reseed_success);
    CHECK(saw_reseed_failure);
}
