#include <benchmark/benchmark.h>

#include <memory>

#include "albench/calibrate.hpp"
#include "albench/dataset.hpp"
#include "albench/model.hpp"
#include "albench/qstrat.hpp"
#include "albench/rng.hpp"

namespace {

using namespace albench;

struct StrategyFixture {
    DatasetBundle bundle;
    std::shared_ptr<CalibratedModel> model;
    PoolState pool;
    StrategyParams params;

    explicit StrategyFixture(std::size_t pool_size) {
        Rng rng(17);
        bundle = make_blobs(4, 8, pool_size / 4, 3.0, rng);
        auto base = std::shared_ptr<TrainedModel>(
            fit_linear(bundle.features, bundle.labels, 1.0));
        model = std::make_shared<CalibratedModel>(
            platt_calibrate(base, bundle.features, bundle.labels));
        for (std::size_t i = 0; i < bundle.size(); ++i) {
            if (i % 10 == 0) {
                pool.labeled.push_back(i);
                pool.labels_of_labeled.push_back(bundle.labels[i]);
            } else {
                pool.unlabeled.push_back(i);
            }
        }
    }
};

const StrategyFixture& fixture(std::size_t pool_size) {
    static std::map<std::size_t, std::unique_ptr<StrategyFixture>> cache;
    auto it = cache.find(pool_size);
    if (it == cache.end()) {
        it = cache.emplace(pool_size, std::make_unique<StrategyFixture>(pool_size)).first;
    }
    return *it->second;
}

void BM_SelectMargin(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(select_margin(*f.model, f.bundle.features, f.pool, 50));
    }
}
BENCHMARK(BM_SelectMargin)->Arg(1000)->Arg(4000);

void BM_SelectCal(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            select_cal(*f.model, f.bundle.features, f.pool, 50, f.params.cal_k));
    }
}
BENCHMARK(BM_SelectCal)->Arg(1000)->Arg(4000);

void BM_SelectReal(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state) {
        Rng rng(23);
        benchmark::DoNotOptimize(
            select_real(*f.model, f.bundle.features, f.pool, 50, f.params, rng));
    }
}
BENCHMARK(BM_SelectReal)->Arg(1000)->Arg(4000);

void BM_SelectDal(benchmark::State& state) {
    const auto& f = fixture(state.range(0));
    for (auto _ : state) {
        Rng rng(29);
        benchmark::DoNotOptimize(select_dal(f.bundle.features, f.pool, 50, f.params, rng));
    }
}
BENCHMARK(BM_SelectDal)->Arg(1000);

}  // namespace
