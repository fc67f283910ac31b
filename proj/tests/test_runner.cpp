#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "albench/rng.hpp"
#include "albench/runner.hpp"

using namespace albench;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const std::string path = "/tmp/albench_runner_" + name;
    std::ofstream out(path);
    out << content;
    return path;
}

MatrixConfig small_matrix(const std::string& out_dir) {
    MatrixConfig config;
    config.datasets.push_back(parse_dataset_token("blobs:easy:c=2:d=3:n=80:sep=4:gseed=5"));
    config.pipelines.push_back(make_pipeline("linear"));
    config.pipelines[0].grid.linear_c = {1.0};
    config.strategies = {StrategyId::random, StrategyId::margin};
    config.batch_seed = {{10, 10}};
    config.trials = 2;
    config.base_seed = 42;
    config.max_labeled = 30;
    config.split.pool_size = 100;
    config.split.test_size = 50;
    config.out_dir = out_dir;
    return config;
}

ResultRow score_row(const std::string& dataset, const std::string& pipeline,
                    const std::string& strategy, std::size_t b, std::size_t s, int trial,
                    int iteration, std::size_t n, double f1) {
    ResultRow row;
    row.dataset = dataset;
    row.pipeline = pipeline;
    row.strategy = strategy;
    row.b = b;
    row.s = s;
    row.trial = trial;
    row.iteration = iteration;
    row.n = n;
    row.f1 = f1;
    return row;
}

}  // namespace

TEST_CASE("expand_matrix") {
    SUBCASE("full-scale product: 5 x 7 x 5 x 2 x 3 = 1050 trials") {
        MatrixConfig config;
        for (int d = 0; d < 5; ++d) {
            config.datasets.push_back(
                parse_dataset_token("blobs:d" + std::to_string(d) + ":c=2:d=4:n=100:sep=2"));
        }
        for (int h = 0; h < 7; ++h) {
            auto pipeline = make_pipeline(h % 2 == 0 ? "linear" : "forest");
            pipeline.id += "-" + std::to_string(h);
            config.pipelines.push_back(pipeline);
        }
        config.strategies = {StrategyId::random, StrategyId::margin, StrategyId::cal,
                             StrategyId::dal, StrategyId::real};
        config.batch_seed = {{200, 200}, {500, 500}};
        config.trials = 3;
        config.max_labeled = 5000;
        config.split.pool_size = 20000;
        config.split.test_size = 5000;
        config.out_dir = "/tmp/never-used";
        CHECK(expand_matrix(config).size() == 1050);
    }

    SUBCASE("desk-scale product: 2 x 2 x 5 x 2 x 3 = 120 trials") {
        MatrixConfig config;
        config.datasets.push_back(parse_dataset_token("blobs:a:c=2:d=4:n=100:sep=2"));
        config.datasets.push_back(parse_dataset_token("blobs:b:c=2:d=4:n=100:sep=3"));
        config.pipelines = {make_pipeline("linear"), make_pipeline("forest")};
        config.strategies = {StrategyId::random, StrategyId::margin, StrategyId::cal,
                             StrategyId::dal, StrategyId::real};
        config.batch_seed = {{50, 50}, {100, 100}};
        config.trials = 3;
        config.max_labeled = 500;
        config.split.pool_size = 600;
        config.split.test_size = 100;
        config.out_dir = "/tmp/never-used";
        CHECK(expand_matrix(config).size() == 120);
    }

    SUBCASE("expansion is deterministic, and seeds ignore the strategy") {
        auto config = small_matrix("/tmp/never-used");
        const auto a = expand_matrix(config);
        const auto b = expand_matrix(config);
        REQUIRE(a.size() == b.size());
        std::map<std::string, std::uint64_t> seed_by_cell;
        for (std::size_t i = 0; i < a.size(); ++i) {
            CHECK(a[i].trial_seed == b[i].trial_seed);
            const std::string cell = a[i].dataset_id + "|" + a[i].pipeline.id + "|" +
                                     std::to_string(a[i].batch_size) + "|" +
                                     std::to_string(a[i].seed_size) + "|" +
                                     std::to_string(a[i].trial_index);
            const auto [it, inserted] = seed_by_cell.emplace(cell, a[i].trial_seed);
            if (!inserted) CHECK(it->second == a[i].trial_seed);  // across strategies
        }
        // 2 strategies share each cell seed: 8 distinct cells, 16 configs
        CHECK(seed_by_cell.size() == a.size() / 2);
    }

    SUBCASE("inconsistent batch/seed/max_labeled is rejected") {
        auto config = small_matrix("/tmp/never-used");
        config.batch_seed = {{7, 10}};
        CHECK_THROWS_AS(expand_matrix(config), std::runtime_error);
    }
}

TEST_CASE("parse_matrix_config") {
    SUBCASE("a full config round-trips into the expected fields") {
        const auto path = write_temp("good.cfg",
                                     "# comment line\n"
                                     "datasets = blobs:easy:c=2:d=3:n=200:sep=4:gseed=9, data/x.csv\n"
                                     "pipelines = linear, forest\n"
                                     "strategies = random, margin, cal\n"
                                     "batch_seed = 200x200, 500x500\n"
                                     "trials = 3\n"
                                     "base_seed = 7\n"
                                     "max_labeled = 5000\n"
                                     "pool_size = 20000\n"
                                     "test_size = 5000\n"
                                     "validation_fraction = 0.2\n"
                                     "out_dir = /tmp/albench_out\n"
                                     "cal_k = 12\n"
                                     "real_clusters = 30\n"
                                     "linear_c = 0.1, 1, 10\n"
                                     "forest_n_estimators = 5, 10\n");
        const auto config = parse_matrix_config(path);
        CHECK(config.datasets.size() == 2);
        CHECK(config.datasets[0].synthetic);
        CHECK(config.datasets[0].id == "easy");
        CHECK(config.datasets[0].classes == 2);
        CHECK(config.datasets[0].per_class == 200);
        CHECK(config.datasets[1].id == "x");
        CHECK(config.datasets[1].csv_path == "data/x.csv");
        CHECK(config.pipelines.size() == 2);
        CHECK(config.pipelines[0].grid.linear_c == std::vector<double>{0.1, 1.0, 10.0});
        CHECK(config.pipelines[1].grid.n_estimators == std::vector<int>{5, 10});
        CHECK(config.pipelines[1].grid.max_depth == std::vector<int>{5, 10, 15, 20, 25, 30});
        CHECK(config.strategies.size() == 3);
        CHECK(config.batch_seed ==
              std::vector<std::pair<std::size_t, std::size_t>>{{200, 200}, {500, 500}});
        CHECK(config.strategy_params.cal_k == 12);
        CHECK(config.strategy_params.real_clusters == 30);
        fs::remove(path);
    }

    SUBCASE("unknown keys are errors") {
        const auto path = write_temp("unknown.cfg",
                                     "datasets = blobs:a:c=2:d=2:n=100:sep=2\n"
                                     "pipelines = linear\nstrategies = random\n"
                                     "batch_seed = 10x10\nmax_labeled = 30\n"
                                     "pool_size = 100\ntest_size = 50\n"
                                     "out_dir = /tmp/x\n"
                                     "coffee = espresso\n");
        CHECK_THROWS_WITH_AS(parse_matrix_config(path), doctest::Contains("unknown key"),
                             std::runtime_error);
        fs::remove(path);
    }

    SUBCASE("unknown strategy tokens fail at parse time") {
        const auto path = write_temp("badstrategy.cfg",
                                     "datasets = blobs:a:c=2:d=2:n=100:sep=2\n"
                                     "pipelines = linear\nstrategies = entropy\n"
                                     "batch_seed = 10x10\nmax_labeled = 30\n"
                                     "pool_size = 100\ntest_size = 50\nout_dir = /tmp/x\n");
        CHECK_THROWS_AS(parse_matrix_config(path), std::invalid_argument);
        fs::remove(path);
    }

    SUBCASE("non-positive grid values are rejected") {
        const auto path = write_temp("badgrid.cfg",
                                     "datasets = blobs:a:c=2:d=2:n=100:sep=2\n"
                                     "pipelines = linear\nstrategies = random\n"
                                     "batch_seed = 10x10\nmax_labeled = 30\n"
                                     "pool_size = 100\ntest_size = 50\nout_dir = /tmp/x\n"
                                     "linear_c = 1, -0.5\n");
        CHECK_THROWS_WITH_AS(parse_matrix_config(path), doctest::Contains("positive"),
                             std::invalid_argument);
        fs::remove(path);
    }

    SUBCASE("non-integer T fails validation") {
        const auto path = write_temp("badT.cfg",
                                     "datasets = blobs:a:c=2:d=2:n=100:sep=2\n"
                                     "pipelines = linear\nstrategies = random\n"
                                     "batch_seed = 7x10\nmax_labeled = 30\n"
                                     "pool_size = 100\ntest_size = 50\nout_dir = /tmp/x\n");
        CHECK_THROWS_WITH_AS(parse_matrix_config(path), doctest::Contains("whole number"),
                             std::runtime_error);
        fs::remove(path);
    }
}

TEST_CASE("make_pool_and_test draws disjoint stratified bundles") {
    const auto bundle = resolve_dataset(parse_dataset_token("blobs:z:c=2:d=2:n=100:sep=3:gseed=3"));
    SplitSpec split;
    split.pool_size = 120;
    split.test_size = 60;
    const auto prepared = make_pool_and_test(bundle, split, 5);
    CHECK(prepared.pool.size() == 120);
    CHECK(prepared.test.size() == 60);

    // no feature row of the test set appears in the pool (rows are unique
    // with probability 1 under the Gaussian generator)
    std::set<std::vector<double>> pool_rows;
    for (std::size_t i = 0; i < prepared.pool.size(); ++i) {
        pool_rows.insert({prepared.pool.features.row(i).begin(),
                          prepared.pool.features.row(i).end()});
    }
    CHECK(pool_rows.size() == 120);
    for (std::size_t i = 0; i < prepared.test.size(); ++i) {
        const std::vector<double> row(prepared.test.features.row(i).begin(),
                                      prepared.test.features.row(i).end());
        CHECK(pool_rows.count(row) == 0);
    }

    SUBCASE("insufficient rows are rejected") {
        split.pool_size = 180;
        split.test_size = 60;
        CHECK_THROWS_AS(make_pool_and_test(bundle, split, 5), std::runtime_error);
    }
}

TEST_CASE("run_matrix") {
    SUBCASE("worker count does not change the sorted table") {
        const std::string dir1 = "/tmp/albench_runner_w1";
        const std::string dir2 = "/tmp/albench_runner_w2";
        fs::remove_all(dir1);
        fs::remove_all(dir2);
        const auto t1 = run_matrix(small_matrix(dir1), 1);
        const auto t2 = run_matrix(small_matrix(dir2), 2);
        CHECK(t1.to_csv(false) == t2.to_csv(false));
        CHECK(t1.rows.size() == 2 * 2 * 3);  // 2 strategies x 2 trials x (T+1 = 3)

        // results.csv on disk matches the returned table
        const auto reloaded = ResultsTable::from_csv(dir1 + "/results.csv");
        CHECK(reloaded.to_csv(false) == t1.to_csv(false));
        fs::remove_all(dir1);
        fs::remove_all(dir2);
    }

    SUBCASE("a run resumes after rows are deleted, recomputing only what is missing") {
        const std::string dir = "/tmp/albench_runner_resume";
        fs::remove_all(dir);
        run_matrix(small_matrix(dir), 2);
        // reload from disk so wall_ms went through the same formatting as the
        // resumed run's reloaded rows
        const auto full = ResultsTable::from_csv(dir + "/results.csv");

        // drop the final completed trial from both files
        auto manifest_lines = [&] {
            std::vector<std::string> lines;
            std::ifstream in(dir + "/manifest.txt");
            std::string line;
            while (std::getline(in, line)) {
                if (!line.empty()) lines.push_back(line);
            }
            return lines;
        }();
        REQUIRE(manifest_lines.size() == 4);
        const std::string dropped = manifest_lines.back();
        manifest_lines.pop_back();
        {
            std::ofstream out(dir + "/manifest.txt");
            for (const auto& line : manifest_lines) out << line << "\n";
        }
        // trials.csv keeps its rows; run_matrix must discard the orphaned
        // ones (their trial is no longer in the manifest) and re-run it
        const auto resumed = run_matrix(small_matrix(dir), 1);
        CHECK(resumed.to_csv(false) == full.to_csv(false));

        // completed trials were not recomputed: their wall_ms survived verbatim
        std::map<std::string, double> before, after;
        for (const auto& row : full.rows) {
            before[format_result_row(row, false)] = row.wall_ms;
        }
        std::size_t reused = 0;
        for (const auto& row : resumed.rows) {
            if (before.at(format_result_row(row, false)) == row.wall_ms) ++reused;
        }
        CHECK(reused >= (4 - 1) * 3);  // all rows of the three untouched trials
        fs::remove_all(dir);
    }
}

TEST_CASE("run_matrix records reseeds and per-trial errors without stopping") {
    // heavily skewed labels: tiny unstratified seed draws are usually
    // single-class, so some trials reseed once and some fail outright
    DatasetBundle bundle;
    bundle.id = "skew";
    bundle.class_count = 2;
    bundle.label_names = {"0", "1"};
    bundle.features = Matrix(150, 2);
    Rng g(5);
    for (std::size_t i = 0; i < 150; ++i) {
        const int label = i < 142 ? 0 : 1;
        bundle.features(i, 0) = label * 4.0 + g.gaussian();
        bundle.features(i, 1) = g.gaussian();
        bundle.labels.push_back(label);
    }
    const std::string csv_path = "/tmp/albench_runner_skew.csv";
    save_table(bundle, csv_path);

    MatrixConfig config;
    config.datasets = {parse_dataset_token(csv_path)};
    config.pipelines = {make_pipeline("linear")};
    config.pipelines[0].grid.linear_c = {1.0};
    config.strategies = {StrategyId::random};
    config.batch_seed = {{5, 5}};
    config.trials = 8;
    config.base_seed = 7;
    config.max_labeled = 10;
    config.split.pool_size = 120;
    config.split.test_size = 30;
    config.out_dir = "/tmp/albench_runner_skew_out";
    fs::remove_all(config.out_dir);

    const auto table = run_matrix(config, 2);
    std::size_t reseeded = 0, errors = 0, clean = 0;
    std::set<int> trials_seen;
    for (const auto& row : table.rows) {
        trials_seen.insert(row.trial);
        if (row.is_error()) {
            CHECK(row.flags.rfind("error:", 0) == 0);
            ++errors;
        } else if (row.flags.find("reseeded") != std::string::npos) {
            ++reseeded;
        } else {
            ++clean;
        }
    }
    CHECK(reseeded > 0);
    CHECK(errors > 0);
    CHECK(clean > 0);               // the run continued past the failures
    CHECK(trials_seen.size() == 8);  // no trial silently dropped
    fs::remove_all(config.out_dir);
    fs::remove(csv_path);
}

TEST_CASE("export_report") {
    SUBCASE("missing random baseline is an error") {
        ResultsTable table;
        table.rows.push_back(score_row("d", "linear", "margin", 10, 10, 0, 0, 10, 0.5));
        CHECK_THROWS_WITH_AS(export_report(table, ReportKind::heatmap_cells),
                             doctest::Contains("missing random baseline"), std::runtime_error);
    }

    SUBCASE("always_on export reproduces the hand-computed fixture") {
        // margin deltas over random: {-1%, +2%, 0%}; cal deltas: {+1%, +1%, +4%}
        ResultsTable table;
        int trial = 0;
        for (const double fq : {0.495, 0.51, 0.5}) {
            table.rows.push_back(score_row("d", "linear", "random", 10, 10, trial, 0, 10, 0.5));
            table.rows.push_back(score_row("d", "linear", "margin", 10, 10, trial, 0, 10, fq));
            ++trial;
        }
        trial = 0;
        for (const double fq : {0.505, 0.505, 0.52}) {
            table.rows.push_back(score_row("d2", "linear", "random", 10, 10, trial, 0, 10, 0.5));
            table.rows.push_back(score_row("d2", "linear", "cal", 10, 10, trial, 0, 10, fq));
            ++trial;
        }
        const auto csv = export_report(table, ReportKind::always_on);

        std::map<std::string, std::vector<std::string>> rows;
        std::istringstream in(csv);
        std::string line;
        std::getline(in, line);
        CHECK(line == "avg_for,pct_negative,mean_nonneg,mean,std_nonneg,std");
        while (std::getline(in, line)) {
            std::vector<std::string> fields;
            std::string field;
            std::istringstream fs_(line);
            while (std::getline(fs_, field, ',')) fields.push_back(field);
            rows[fields[0]] = fields;
        }
        REQUIRE(rows.count("margin") == 1);
        CHECK(std::stod(rows["margin"][1]) == doctest::Approx(100.0 / 3.0).epsilon(1e-6));
        CHECK(std::stod(rows["margin"][2]) == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::stod(rows["margin"][3]) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
        REQUIRE(rows.count("cal") == 1);
        CHECK(std::stod(rows["cal"][1]) == doctest::Approx(0.0));
        CHECK(std::stod(rows["cal"][2]) == doctest::Approx(2.0).epsilon(1e-6));
        REQUIRE(rows.count("overall") == 1);
        // all six deltas: {-1, 2, 0, 1, 1, 4}
        CHECK(std::stod(rows["overall"][1]) == doctest::Approx(100.0 / 6.0).epsilon(1e-6));
        CHECK(std::stod(rows["overall"][3]) == doctest::Approx(7.0 / 6.0).epsilon(1e-6));
    }

    SUBCASE("delta_curves marginalizes per pipeline and per strategy") {
        ResultsTable table;
        int trial = 0;
        for (const double fq : {0.55, 0.60}) {
            table.rows.push_back(score_row("d", "linear", "random", 10, 10, trial, 0, 10, 0.5));
            table.rows.push_back(score_row("d", "linear", "margin", 10, 10, trial, 0, 10, fq));
            ++trial;
        }
        const auto csv = export_report(table, ReportKind::delta_curves);
        CHECK(csv.find("axis,name,n,mean_delta,count") == 0);
        // margin deltas are +10% and +20%: both marginals average to 15%
        CHECK(csv.find("pipeline,linear,10,15.000000,2") != std::string::npos);
        CHECK(csv.find("strategy,margin,10,15.000000,2") != std::string::npos);
    }

    SUBCASE("tests export emits wilcoxon, friedman and kendall rows") {
        ResultsTable table;
        Rng rng(3);
        for (const auto& bs : std::vector<std::pair<std::size_t, std::size_t>>{{10, 10}, {20, 20}}) {
            for (int trial = 0; trial < 3; ++trial) {
                for (const std::size_t n : {20u, 40u}) {
                    if (n % bs.first != 0) continue;
                    const int iteration = static_cast<int>(n / bs.first) - 1;
                    table.rows.push_back(score_row("d", "linear", "random", bs.first, bs.second,
                                                   trial, iteration, n, 0.5));
                    for (const auto& strategy : {"margin", "cal"}) {
                        table.rows.push_back(score_row("d", "linear", strategy, bs.first,
                                                       bs.second, trial, iteration, n,
                                                       0.45 + 0.1 * rng.uniform_real()));
                    }
                }
            }
        }
        const auto csv = export_report(table, ReportKind::tests);
        CHECK(csv.find("test,scope,statistic,value") == 0);
        CHECK(csv.find("wilcoxon_batch_seed,overall,p_two_sided,") != std::string::npos);
        CHECK(csv.find("friedman,strategies,chi2,") != std::string::npos);
        CHECK(csv.find("kendalls_w,strategies,W,") != std::string::npos);
        CHECK(csv.find("kendalls_w,strategies,items,2") != std::string::npos);
    }

    SUBCASE("variance_profile export carries per-setting grids") {
        ResultsTable table;
        for (const auto& strategy : {"random", "margin"}) {
            table.rows.push_back(score_row("d", "linear", strategy, 10, 10, 0, 0, 10,
                                           strategy == std::string("random") ? 0.4 : 0.6));
            table.rows.push_back(score_row("d", "linear", strategy, 10, 10, 0, 1, 20, 0.7));
        }
        const auto csv = export_report(table, ReportKind::variance_profile);
        CHECK(csv.find("b,s,n,mean_variance,cells") == 0);
        CHECK(csv.find("10,10,10,0.010000,1") != std::string::npos);
        CHECK(csv.find("10,10,20,0.000000,1") != std::string::npos);
    }
}
