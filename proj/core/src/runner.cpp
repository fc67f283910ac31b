#include "albench/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "albench/rng.hpp"

namespace albench {

namespace {

std::vector<std::string> split_list(const std::string& value, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : value) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

template <typename T>
T parse_number(const std::string& s, const std::string& what) {
    T v{};
    const std::string t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) {
        throw std::runtime_error("config: bad " + what + " value '" + s + "'");
    }
    return v;
}

double parse_real_value(const std::string& s, const std::string& what) {
    double v = 0.0;
    const std::string t = trim(s);
    auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) {
        throw std::runtime_error("config: bad " + what + " value '" + s + "'");
    }
    return v;
}

std::string sanitize_flag_text(std::string text) {
    for (char& c : text) {
        if (c == ',' || c == '\n' || c == '\r' || c == ';') c = ' ';
    }
    return text;
}

}  // namespace

DatasetSpec parse_dataset_token(const std::string& token) {
    DatasetSpec spec;
    if (token.rfind("blobs:", 0) != 0) {
        spec.csv_path = token;
        spec.id = token;
        const auto slash = spec.id.find_last_of('/');
        if (slash != std::string::npos) spec.id = spec.id.substr(slash + 1);
        const auto dot = spec.id.find_last_of('.');
        if (dot != std::string::npos) spec.id = spec.id.substr(0, dot);
        return spec;
    }
    const auto parts = split_list(token, ':');
    if (parts.size() < 2 || parts[1].empty()) {
        throw std::runtime_error("config: synthetic dataset needs a name: '" + token + "'");
    }
    spec.synthetic = true;
    spec.id = parts[1];
    for (std::size_t i = 2; i < parts.size(); ++i) {
        const auto eq = parts[i].find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: bad synthetic parameter '" + parts[i] + "'");
        }
        const std::string key = parts[i].substr(0, eq);
        const std::string value = parts[i].substr(eq + 1);
        if (key == "c") {
            spec.classes = parse_number<int>(value, "classes");
        } else if (key == "d") {
            spec.dim = parse_number<std::size_t>(value, "dim");
        } else if (key == "n") {
            spec.per_class = parse_number<std::size_t>(value, "per-class");
        } else if (key == "sep") {
            spec.separation = parse_real_value(value, "separation");
        } else if (key == "gseed") {
            spec.generator_seed = parse_number<std::uint64_t>(value, "generator seed");
        } else {
            throw std::runtime_error("config: unknown synthetic parameter '" + key + "'");
        }
    }
    return spec;
}

DatasetBundle resolve_dataset(const DatasetSpec& spec) {
    if (!spec.synthetic) return load_table(spec.csv_path);
    Rng rng(spec.generator_seed);
    DatasetBundle bundle = make_blobs(spec.classes, spec.dim, spec.per_class,
                                      spec.separation, rng);
    bundle.id = spec.id;
    return bundle;
}

void MatrixConfig::validate() const {
    if (datasets.empty() || pipelines.empty() || strategies.empty() || batch_seed.empty()) {
        throw std::runtime_error("config: datasets, pipelines, strategies and batch_seed must be non-empty");
    }
    if (trials < 1) throw std::runtime_error("config: trials must be >= 1");
    if (out_dir.empty()) throw std::runtime_error("config: out_dir is required");
    for (const auto& [b, s] : batch_seed) {
        if (b == 0 || s == 0 || max_labeled < s || (max_labeled - s) % b != 0) {
            throw std::runtime_error(
                "config: (max_labeled - s) must be a whole number of batches for " +
                std::to_string(b) + "x" + std::to_string(s));
        }
    }
    if (split.pool_size < max_labeled) {
        throw std::runtime_error("config: pool_size must be >= max_labeled");
    }
    if (split.test_size == 0) throw std::runtime_error("config: test_size must be positive");
    if (strategy_params.cal_k == 0 || strategy_params.real_clusters == 0 ||
        strategy_params.dal_hidden == 0 || strategy_params.dal_epochs < 0) {
        throw std::runtime_error("config: strategy parameters must be positive");
    }
}

MatrixConfig parse_matrix_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);

    MatrixConfig config;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config: expected key = value on line " +
                                     std::to_string(line_no));
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!seen.insert(key).second) {
            throw std::runtime_error("config: duplicate key '" + key + "'");
        }

        if (key == "datasets") {
            for (const auto& tok : split_list(value, ',')) {
                config.datasets.push_back(parse_dataset_token(trim(tok)));
            }
        } else if (key == "pipelines") {
            for (const auto& tok : split_list(value, ',')) {
                config.pipelines.push_back(make_pipeline(trim(tok)));
            }
        } else if (key == "strategies") {
            for (const auto& tok : split_list(value, ',')) {
                config.strategies.push_back(strategy_from_string(trim(tok)));
            }
        } else if (key == "batch_seed") {
            for (const auto& tok : split_list(value, ',')) {
                const auto parts = split_list(trim(tok), 'x');
                if (parts.size() != 2) {
                    throw std::runtime_error("config: batch_seed entries look like 200x200");
                }
                config.batch_seed.emplace_back(parse_number<std::size_t>(parts[0], "batch"),
                                               parse_number<std::size_t>(parts[1], "seed size"));
            }
        } else if (key == "trials") {
            config.trials = parse_number<int>(value, "trials");
        } else if (key == "base_seed") {
            config.base_seed = parse_number<std::uint64_t>(value, "base_seed");
        } else if (key == "max_labeled") {
            config.max_labeled = parse_number<std::size_t>(value, "max_labeled");
        } else if (key == "pool_size") {
            config.split.pool_size = parse_number<std::size_t>(value, "pool_size");
        } else if (key == "test_size") {
            config.split.test_size = parse_number<std::size_t>(value, "test_size");
        } else if (key == "validation_fraction") {
            config.split.validation_fraction = parse_real_value(value, "validation_fraction");
        } else if (key == "out_dir") {
            config.out_dir = value;
        } else if (key == "cal_k") {
            config.strategy_params.cal_k = parse_number<std::size_t>(value, "cal_k");
        } else if (key == "real_clusters") {
            config.strategy_params.real_clusters = parse_number<std::size_t>(value, "real_clusters");
        } else if (key == "dal_hidden") {
            config.strategy_params.dal_hidden = parse_number<std::size_t>(value, "dal_hidden");
        } else if (key == "dal_epochs") {
            config.strategy_params.dal_epochs = parse_number<int>(value, "dal_epochs");
        } else if (key == "linear_c") {
            std::vector<double> values;
            for (const auto& tok : split_list(value, ',')) {
                values.push_back(parse_real_value(tok, "linear_c"));
            }
            for (auto& p : config.pipelines) {
                if (p.kind == PipelineKind::linear_margin) p.grid.linear_c = values;
            }
        } else if (key == "forest_min_samples_leaf" || key == "forest_n_estimators" ||
                   key == "forest_max_depth") {
            std::vector<int> values;
            for (const auto& tok : split_list(value, ',')) {
                values.push_back(parse_number<int>(tok, key));
            }
            for (auto& p : config.pipelines) {
                if (p.kind != PipelineKind::random_forest) continue;
                if (key == "forest_min_samples_leaf") p.grid.min_samples_leaf = values;
                if (key == "forest_n_estimators") p.grid.n_estimators = values;
                if (key == "forest_max_depth") p.grid.max_depth = values;
            }
        } else {
            throw std::runtime_error("config: unknown key '" + key + "'");
        }
    }
    // grid overrides require the pipelines key to appear before them; enforce
    // by re-checking that grids are non-empty for each pipeline
    for (const auto& p : config.pipelines) {
        p.grid.validate_for(p.kind);
    }
    config.validate();
    return config;
}

std::vector<ExperimentConfig> expand_matrix(const MatrixConfig& config) {
    config.validate();
    std::vector<ExperimentConfig> out;
    for (const auto& dataset : config.datasets) {
        for (const auto& pipeline : config.pipelines) {
            for (const auto strategy : config.strategies) {
                for (const auto& [b, s] : config.batch_seed) {
                    for (int trial = 0; trial < config.trials; ++trial) {
                        ExperimentConfig ec;
                        ec.dataset_id = dataset.id;
                        ec.pipeline = pipeline;
                        ec.strategy = strategy;
                        ec.batch_size = b;
                        ec.seed_size = s;
                        ec.max_labeled = config.max_labeled;
                        ec.validation_fraction = config.split.validation_fraction;
                        ec.trial_index = trial;
                        ec.strategy_params = config.strategy_params;
                        // strategy deliberately left out of the seed derivation
                        ec.trial_seed = derive_seed(
                            config.base_seed,
                            "trial:" + dataset.id + ":" + pipeline.id + ":" +
                                std::to_string(b) + "x" + std::to_string(s) + ":" +
                                std::to_string(trial));
                        ec.validate();
                        out.push_back(std::move(ec));
                    }
                }
            }
        }
    }
    return out;
}

std::string trial_key(const ExperimentConfig& config) {
    return config.dataset_id + "|" + config.pipeline.id + "|" + to_string(config.strategy) +
           "|" + std::to_string(config.batch_size) + "|" + std::to_string(config.seed_size) +
           "|" + std::to_string(config.trial_index);
}

PoolTestSplit make_pool_and_test(const DatasetBundle& bundle, const SplitSpec& split,
                                 std::uint64_t base_seed) {
    if (bundle.size() < split.pool_size + split.test_size) {
        throw std::runtime_error("dataset " + bundle.id + " has " + std::to_string(bundle.size()) +
                                 " rows; pool_size + test_size needs " +
                                 std::to_string(split.pool_size + split.test_size));
    }
    Rng pool_rng(derive_seed(base_seed, "pool:" + bundle.id));
    const auto pool_idx = stratified_sample_indices(bundle, split.pool_size, pool_rng);

    std::vector<bool> in_pool(bundle.size(), false);
    for (const std::size_t i : pool_idx) in_pool[i] = true;
    std::vector<std::size_t> rest;
    rest.reserve(bundle.size() - pool_idx.size());
    for (std::size_t i = 0; i < bundle.size(); ++i) {
        if (!in_pool[i]) rest.push_back(i);
    }

    PoolTestSplit prepared;
    prepared.pool.id = bundle.id;
    prepared.pool.class_count = bundle.class_count;
    prepared.pool.label_names = bundle.label_names;
    prepared.pool.features = bundle.features.take_rows(pool_idx);
    for (const std::size_t i : pool_idx) prepared.pool.labels.push_back(bundle.labels[i]);
    validate_bundle(prepared.pool);

    DatasetBundle remainder;
    remainder.id = bundle.id;
    remainder.class_count = bundle.class_count;
    remainder.label_names = bundle.label_names;
    remainder.features = bundle.features.take_rows(rest);
    for (const std::size_t i : rest) remainder.labels.push_back(bundle.labels[i]);
    validate_bundle(remainder);

    Rng test_rng(derive_seed(base_seed, "test:" + bundle.id));
    prepared.test = stratified_sample(remainder, split.test_size, test_rng);
    return prepared;
}

namespace {

std::vector<ResultRow> rows_from_record(const RunRecord& record) {
    std::vector<ResultRow> rows;
    rows.reserve(record.entries.size());
    for (const auto& entry : record.entries) {
        ResultRow row;
        row.dataset = record.config.dataset_id;
        row.pipeline = record.config.pipeline.id;
        row.strategy = to_string(record.config.strategy);
        row.b = record.config.batch_size;
        row.s = record.config.seed_size;
        row.trial = record.config.trial_index;
        row.iteration = entry.iteration;
        row.n = entry.n;
        row.f1 = entry.f1;
        row.hyperparams = entry.hyperparams;
        std::string flags;
        if (record.reseeded) flags = "reseeded";
        if (entry.calibration_fallback) {
            if (!flags.empty()) flags += ';';
            flags += "calibration_fallback";
        }
        row.flags = flags;
        row.seed = record.config.trial_seed;
        row.wall_ms = entry.wall_ms;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::set<std::string> read_manifest(const std::string& path) {
    std::set<std::string> done;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) done.insert(line);
    }
    return done;
}

}  // namespace

ResultsTable run_matrix(const MatrixConfig& config, unsigned workers) {
    config.validate();
    if (workers == 0) workers = 1;
    namespace fs = std::filesystem;
    fs::create_directories(config.out_dir);
    const std::string trials_path = config.out_dir + "/trials.csv";
    const std::string manifest_path = config.out_dir + "/manifest.txt";
    const std::string results_path = config.out_dir + "/results.csv";

    // Shared read-only bundles.
    std::map<std::string, PoolTestSplit> datasets;
    for (const auto& spec : config.datasets) {
        datasets.emplace(spec.id, make_pool_and_test(resolve_dataset(spec), config.split,
                                                     config.base_seed));
    }

    auto trials = expand_matrix(config);

    // Resume: completed trials are listed in the manifest and their rows sit
    // in trials.csv. Rows without a manifest entry come from an interrupted
    // trial and are dropped before re-running it.
    ResultsTable table;
    const auto done = read_manifest(manifest_path);
    if (fs::exists(trials_path)) {
        ResultsTable on_disk = ResultsTable::from_csv(trials_path);
        bool dropped = false;
        for (auto& row : on_disk.rows) {
            const std::string key = row.dataset + "|" + row.pipeline + "|" + row.strategy +
                                    "|" + std::to_string(row.b) + "|" + std::to_string(row.s) +
                                    "|" + std::to_string(row.trial);
            if (done.count(key)) {
                table.rows.push_back(std::move(row));
            } else {
                dropped = true;
            }
        }
        if (dropped) {
            std::ofstream out(trials_path);
            if (!out) throw std::runtime_error("run_matrix: cannot rewrite " + trials_path);
            out << table.to_csv(true);
        }
    } else {
        std::ofstream out(trials_path);
        if (!out) throw std::runtime_error("run_matrix: cannot create " + trials_path);
        out << result_csv_header(true) << '\n';
    }
    std::vector<const ExperimentConfig*> pending;
    for (const auto& trial : trials) {
        if (!done.count(trial_key(trial))) pending.push_back(&trial);
    }

    std::mutex write_mutex;
    std::ofstream trials_out(trials_path, std::ios::app);
    std::ofstream manifest_out(manifest_path, std::ios::app);
    if (!trials_out || !manifest_out) {
        throw std::runtime_error("run_matrix: cannot open output files in " + config.out_dir);
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> io_failed{false};
    std::string io_error;

    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= pending.size() || io_failed.load()) break;
            const ExperimentConfig& trial = *pending[i];
            const auto& data = datasets.at(trial.dataset_id);

            std::vector<ResultRow> rows;
            try {
                rows = rows_from_record(run_trial(trial, data.pool, data.test));
            } catch (const std::exception& e) {
                ResultRow row;
                row.dataset = trial.dataset_id;
                row.pipeline = trial.pipeline.id;
                row.strategy = to_string(trial.strategy);
                row.b = trial.batch_size;
                row.s = trial.seed_size;
                row.trial = trial.trial_index;
                row.iteration = -1;
                row.n = 0;
                row.f1 = std::nan("");
                row.flags = "error:" + sanitize_flag_text(e.what());
                row.seed = trial.trial_seed;
                rows.push_back(std::move(row));
            }

            std::lock_guard<std::mutex> lock(write_mutex);
            for (const auto& row : rows) {
                trials_out << format_result_row(row, true) << '\n';
                table.rows.push_back(row);
            }
            trials_out.flush();
            manifest_out << trial_key(trial) << '\n';
            manifest_out.flush();
            if (!trials_out || !manifest_out) {
                io_failed.store(true);
                io_error = "run_matrix: write failed in " + config.out_dir;
            }
        }
    };

    std::vector<std::thread> threads;
    const auto thread_count = std::min<std::size_t>(workers, std::max<std::size_t>(pending.size(), 1));
    threads.reserve(thread_count);
    for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (io_failed.load()) throw std::runtime_error(io_error);

    table.sort_canonical();
    table.check_primary_key();
    std::ofstream results(results_path);
    if (!results) throw std::runtime_error("run_matrix: cannot write " + results_path);
    results << table.to_csv(true);
    if (!results) throw std::runtime_error("run_matrix: write failed for " + results_path);
    return table;
}

ReportKind report_kind_from_string(const std::string& token) {
    if (token == "delta_curves") return ReportKind::delta_curves;
    if (token == "heatmap_cells") return ReportKind::heatmap_cells;
    if (token == "always_on") return ReportKind::always_on;
    if (token == "variance_profile") return ReportKind::variance_profile;
    if (token == "tests") return ReportKind::tests;
    throw std::runtime_error("unknown report kind '" + token + "'");
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return buf;
}

std::vector<std::string> pipelines_in(const std::vector<ImprovementRecord>& records) {
    std::set<std::string> set;
    for (const auto& r : records) set.insert(r.pipeline);
    return {set.begin(), set.end()};
}

std::vector<StrategyId> strategies_in(const std::vector<ImprovementRecord>& records) {
    std::set<StrategyId> set;
    for (const auto& r : records) set.insert(r.strategy);
    return {set.begin(), set.end()};
}

std::vector<std::size_t> sizes_in(const std::vector<ImprovementRecord>& records) {
    std::set<std::size_t> set;
    for (const auto& r : records) set.insert(r.n);
    return {set.begin(), set.end()};
}

// mean of defined deltas under a filter, along with the match count
std::pair<double, std::size_t> mean_delta(const std::vector<ImprovementRecord>& records,
                                          const RecordFilter& filter) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& r : records) {
        if (!r.defined || !filter.matches(r)) continue;
        total += r.delta;
        ++count;
    }
    return {count > 0 ? total / static_cast<double>(count) : 0.0, count};
}

std::string export_delta_curves(const std::vector<ImprovementRecord>& records) {
    std::string out = "axis,name,n,mean_delta,count\n";
    for (const auto& pipeline : pipelines_in(records)) {
        for (const std::size_t n : sizes_in(records)) {
            RecordFilter f;
            f.pipeline = pipeline;
            f.n = n;
            const auto [mean, count] = mean_delta(records, f);
            if (count == 0) continue;
            out += "pipeline," + pipeline + "," + std::to_string(n) + "," +
                   format_value(mean) + "," + std::to_string(count) + "\n";
        }
    }
    for (const auto strategy : strategies_in(records)) {
        for (const std::size_t n : sizes_in(records)) {
            RecordFilter f;
            f.strategy = strategy;
            f.n = n;
            const auto [mean, count] = mean_delta(records, f);
            if (count == 0) continue;
            out += "strategy," + to_string(strategy) + "," + std::to_string(n) + "," +
                   format_value(mean) + "," + std::to_string(count) + "\n";
        }
    }
    return out;
}

std::string export_heatmap_cells(const std::vector<ImprovementRecord>& records) {
    std::string out = "pipeline,strategy,n,mean_delta,count\n";
    for (const auto& pipeline : pipelines_in(records)) {
        for (const auto strategy : strategies_in(records)) {
            for (const std::size_t n : sizes_in(records)) {
                RecordFilter f;
                f.pipeline = pipeline;
                f.strategy = strategy;
                f.n = n;
                const auto [mean, count] = mean_delta(records, f);
                if (count == 0) continue;
                out += pipeline + "," + to_string(strategy) + "," + std::to_string(n) + "," +
                       format_value(mean) + "," + std::to_string(count) + "\n";
            }
        }
    }
    return out;
}

void append_always_on_row(std::string& out, const std::string& label,
                          const std::vector<double>& deltas) {
    if (deltas.empty()) return;
    const auto summary = always_on_summary(deltas);
    out += label + "," + format_value(summary.pct_negative) + ",";
    out += summary.mean_nonneg ? format_value(*summary.mean_nonneg) : std::string();
    out += "," + format_value(summary.mean) + ",";
    out += summary.std_nonneg ? format_value(*summary.std_nonneg) : std::string();
    out += "," + format_value(summary.stddev) + "\n";
}

std::string export_always_on(const std::vector<ImprovementRecord>& records) {
    std::string out = "avg_for,pct_negative,mean_nonneg,mean,std_nonneg,std\n";
    const auto collect = [&](const RecordFilter& f) {
        std::vector<double> deltas;
        for (const auto& r : records) {
            if (r.defined && f.matches(r)) deltas.push_back(r.delta);
        }
        return deltas;
    };
    append_always_on_row(out, "overall", collect(RecordFilter{}));
    for (const auto& pipeline : pipelines_in(records)) {
        RecordFilter f;
        f.pipeline = pipeline;
        append_always_on_row(out, pipeline, collect(f));
    }
    for (const auto strategy : strategies_in(records)) {
        RecordFilter f;
        f.strategy = strategy;
        append_always_on_row(out, to_string(strategy), collect(f));
    }
    return out;
}

std::string export_variance_profile(const ResultsTable& table) {
    // distinct (b, s) settings keep their own n grids
    std::set<std::pair<std::size_t, std::size_t>> settings;
    for (const auto& r : table.rows) {
        if (!r.is_error()) settings.insert({r.b, r.s});
    }
    std::string out = "b,s,n,mean_variance,cells\n";
    for (const auto& [b, s] : settings) {
        // mean-over-trials F1 per (pipeline, dataset, strategy, n)
        std::map<std::tuple<std::string, std::string, std::string, std::size_t>,
                 std::pair<double, std::size_t>>
            sums;
        for (const auto& r : table.rows) {
            if (r.is_error() || r.b != b || r.s != s) continue;
            auto& slot = sums[{r.pipeline, r.dataset, r.strategy, r.n}];
            slot.first += r.f1;
            slot.second += 1;
        }
        std::vector<ScoreCell> cells;
        for (const auto& [key, slot] : sums) {
            cells.push_back(ScoreCell{std::get<0>(key), std::get<1>(key), std::get<2>(key),
                                      std::get<3>(key),
                                      slot.first / static_cast<double>(slot.second)});
        }
        // contributing (pipeline, dataset) combinations per n
        std::map<std::size_t, std::set<std::pair<std::string, std::string>>> combos;
        for (const auto& c : cells) combos[c.n].insert({c.pipeline, c.dataset});
        for (const auto& [n, value] : variance_profile(cells)) {
            out += std::to_string(b) + "," + std::to_string(s) + "," + std::to_string(n) +
                   "," + format_value(value) + "," + std::to_string(combos.at(n).size()) + "\n";
        }
    }
    return out;
}

// Paired deltas for the batch/seed-size comparison: per (pipeline, strategy,
// dataset, trial, aligned n), the mean delta under each (b, s) setting.
std::string export_tests(const std::vector<ImprovementRecord>& records) {
    std::string out = "test,scope,statistic,value\n";

    std::set<std::pair<std::size_t, std::size_t>> settings;
    for (const auto& r : records) settings.insert({r.b, r.s});
    if (settings.size() == 2) {
        const auto first = *settings.begin();
        using PairKey = std::tuple<std::string, std::string, std::string, int, std::size_t>;
        const auto run_wilcoxon = [&](const RecordFilter& filter, const std::string& scope) {
            std::map<PairKey, std::pair<std::pair<double, std::size_t>,
                                        std::pair<double, std::size_t>>>
                pairs;
            for (const auto& r : records) {
                if (!r.defined || !filter.matches(r)) continue;
                const PairKey key{r.pipeline, to_string(r.strategy), r.dataset, r.trial, r.n};
                auto& slot = pairs[key];
                auto& side = (std::pair{r.b, r.s} == first) ? slot.first : slot.second;
                side.first += r.delta;
                side.second += 1;
            }
            std::vector<double> a, c;
            for (const auto& [key, slot] : pairs) {
                (void)key;
                if (slot.first.second == 0 || slot.second.second == 0) continue;
                a.push_back(slot.first.first / static_cast<double>(slot.first.second));
                c.push_back(slot.second.first / static_cast<double>(slot.second.second));
            }
            if (a.size() < 2) return;
            try {
                const auto result = wilcoxon_signed_rank(a, c, Alternative::two_sided);
                out += "wilcoxon_batch_seed," + scope + ",W," + format_value(result.statistic) + "\n";
                out += "wilcoxon_batch_seed," + scope + ",p_two_sided," +
                       format_value(result.p_value) + "\n";
                out += "wilcoxon_batch_seed," + scope + ",pairs," + std::to_string(a.size()) + "\n";
            } catch (const std::invalid_argument&) {
                // all pairs tied: no test row
            }
        };
        run_wilcoxon(RecordFilter{}, "overall");
        for (const auto& pipeline : pipelines_in(records)) {
            RecordFilter f;
            f.pipeline = pipeline;
            run_wilcoxon(f, "pipeline:" + pipeline);
        }
        for (const auto strategy : strategies_in(records)) {
            RecordFilter f;
            f.strategy = strategy;
            run_wilcoxon(f, "strategy:" + to_string(strategy));
        }
    }

    const auto effect_rows = [&](TreatmentAxis axis, const std::string& scope) {
        const auto [blocks, treatments] = matched_blocks(records, axis);
        if (blocks.size() < 2 || treatments.size() < 2) return;
        const auto friedman = friedman_test(blocks);
        const double w = kendalls_w(blocks);
        out += "friedman," + scope + ",chi2," + format_value(friedman.chi2) + "\n";
        out += "friedman," + scope + ",df," + std::to_string(friedman.df) + "\n";
        out += "friedman," + scope + ",p," + format_value(friedman.p_value) + "\n";
        out += "kendalls_w," + scope + ",W," + format_value(w) + "\n";
        out += "kendalls_w," + scope + ",judges," + std::to_string(blocks.size()) + "\n";
        out += "kendalls_w," + scope + ",items," + std::to_string(treatments.size()) + "\n";
    };
    effect_rows(TreatmentAxis::strategy, "strategies");
    effect_rows(TreatmentAxis::pipeline, "pipelines");
    return out;
}

}  // namespace

std::string export_report(const ResultsTable& table, ReportKind kind) {
    switch (kind) {
        case ReportKind::delta_curves:
            return export_delta_curves(improvement_records(table));
        case ReportKind::heatmap_cells:
            return export_heatmap_cells(improvement_records(table));
        case ReportKind::always_on:
            return export_always_on(improvement_records(table));
        case ReportKind::variance_profile:
            return export_variance_profile(table);
        case ReportKind::tests:
            return export_tests(improvement_records(table));
    }
    throw std::logic_error("export_report: unhandled kind");
}

void export_report_file(const ResultsTable& table, ReportKind kind,
                        const std::string& out_path) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("export_report: cannot write " + out_path);
    out << export_report(table, kind);
    if (!out) throw std::runtime_error("export_report: write failed for " + out_path);
}

}  // namespace albench
