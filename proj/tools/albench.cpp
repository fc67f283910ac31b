#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "albench/dataset.hpp"
#include "albench/results.hpp"
#include "albench/rng.hpp"
#include "albench/runner.hpp"

namespace {

int cmd_run(const std::string& config_path, unsigned workers, const std::string& out_override) {
    albench::MatrixConfig config = albench::parse_matrix_config(config_path);
    if (!out_override.empty()) config.out_dir = out_override;
    const auto table = albench::run_matrix(config, workers);
    std::size_t errors = 0;
    for (const auto& row : table.rows) errors += row.is_error();
    std::cout << "wrote " << table.rows.size() << " rows to " << config.out_dir
              << "/results.csv";
    if (errors > 0) std::cout << " (" << errors << " trial error rows)";
    std::cout << "\n";
    return errors == 0 ? 0 : 1;
}

int cmd_analyze(const std::string& in_dir, const std::string& report,
                const std::string& out_path) {
    const auto kind = albench::report_kind_from_string(report);
    const auto table = albench::ResultsTable::from_csv(in_dir + "/results.csv");
    albench::export_report_file(table, kind, out_path);
    std::cout << "wrote " << report << " report to " << out_path << "\n";
    return 0;
}

int cmd_synth(int classes, std::size_t dim, std::size_t per_class, double separation,
              std::uint64_t seed, const std::string& out_path) {
    albench::Rng rng(seed);
    auto bundle = albench::make_blobs(classes, dim, per_class, separation, rng);
    albench::save_table(bundle, out_path);
    std::cout << "wrote " << bundle.size() << " rows (" << classes << " classes, dim "
              << dim << ") to " << out_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"albench: batch active-learning benchmark runner"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    auto* run = app.add_subcommand("run", "execute an experiment matrix");
    run->add_option("--config", config_path, "matrix config file")->required();
    run->add_option("--workers", workers, "parallel trial workers");
    run->add_option("--out", out_dir, "output directory (overrides config out_dir)");

    std::string in_dir, report, report_out;
    auto* analyze = app.add_subcommand("analyze", "export report tables from results");
    analyze->add_option("--in", in_dir, "directory holding results.csv")->required();
    analyze->add_option("--report", report,
                        "delta_curves|heatmap_cells|always_on|variance_profile|tests")
        ->required();
    analyze->add_option("--out", report_out, "output CSV path")->required();

    int classes = 2;
    std::size_t dim = 2, per_class = 100;
    double separation = 1.0;
    std::uint64_t seed = 0;
    std::string synth_out;
    auto* synth = app.add_subcommand("synth", "generate a synthetic blob dataset CSV");
    synth->add_option("--classes", classes, "number of classes")->required();
    synth->add_option("--dim", dim, "feature dimension")->required();
    synth->add_option("--per-class", per_class, "instances per class")->required();
    synth->add_option("--separation", separation, "distance between class means")->required();
    synth->add_option("--seed", seed, "generator seed")->required();
    synth->add_option("--out", synth_out, "output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, workers, out_dir);
        if (analyze->parsed()) return cmd_analyze(in_dir, report, report_out);
        if (synth->parsed()) return cmd_synth(classes, dim, per_class, separation, seed, synth_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
