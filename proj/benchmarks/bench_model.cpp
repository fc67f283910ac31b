#include <benchmark/benchmark.h>

#include <memory>

#include "albench/calibrate.hpp"
#include "albench/dataset.hpp"
#include "albench/forest.hpp"
#include "albench/grid_search.hpp"
#include "albench/model.hpp"
#include "albench/rng.hpp"

namespace {

using namespace albench;

const DatasetBundle& training_data() {
    static const DatasetBundle bundle = [] {
        Rng rng(31);
        return make_blobs(4, 8, 250, 3.0, rng);  // 1000 rows
    }();
    return bundle;
}

void BM_FitLinear(benchmark::State& state) {
    const auto& data = training_data();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fit_linear(data.features, data.labels, 1.0));
    }
}
BENCHMARK(BM_FitLinear);

void BM_FitForest(benchmark::State& state) {
    const auto& data = training_data();
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            fit_forest(data.features, data.labels, 1, state.range(0), 15, 7));
    }
}
BENCHMARK(BM_FitForest)->Arg(10)->Arg(50);

void BM_PlattCalibrate(benchmark::State& state) {
    const auto& data = training_data();
    const auto model = std::shared_ptr<TrainedModel>(
        fit_linear(data.features, data.labels, 1.0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(platt_calibrate(model, data.features, data.labels));
    }
}
BENCHMARK(BM_PlattCalibrate);

void BM_GridSearchForest(benchmark::State& state) {
    const auto& data = training_data();
    PipelineSpec spec = make_pipeline("forest");
    spec.grid.min_samples_leaf = {1, 5};
    spec.grid.n_estimators = {5, 10, 20};
    spec.grid.max_depth = {5, 10};
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            grid_search(spec, data.features, data.labels, MetricSpec{}, 0.2, 11));
    }
}
BENCHMARK(BM_GridSearchForest);

}  // namespace
