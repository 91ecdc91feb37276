// rissm_sim: BER experiments for RIS-assisted RSM / RSSK links.
//
//   rissm_sim run fig3 --out fig3.csv
//   rissm_sim run my_experiment.ini --seed 7 --workers 4
//   rissm_sim train qpsk.ini --out qpsk_n64.model
//   rissm_sim plot-data fig3.csv --out plots/

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "rissm/errors.hpp"
#include "rissm/experiment.hpp"
#include "rissm/model_io.hpp"

namespace {

using namespace rissm;

void log_line(const std::string& msg) { std::cerr << msg << std::endl; }

ExperimentConfig resolve_config(const std::string& source) {
    if (is_preset(source) && !std::filesystem::exists(source)) {
        return preset_config(source);
    }
    return load_config(source);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo BER simulator for RIS-assisted received spatial modulation"};
    app.require_subcommand(1);

    std::string source;
    std::string out_path;
    std::string model_path;
    std::string feature_mode;
    std::uint64_t seed = 0;
    std::uint64_t min_errors = 0;
    std::uint64_t max_bits = 0;
    unsigned workers = 0;
    bool print_config = false;

    auto* run = app.add_subcommand("run", "run a config file or preset (fig3..fig6) and write a CSV");
    run->add_option("config", source, "config file or preset name")->required();
    run->add_option("--out", out_path, "CSV output path (default: stdout)");
    run->add_option("--model", model_path, "B-DNN model file (loaded if present, written after training)");
    run->add_option("--workers", workers, "worker threads (0 = all cores)");
    run->add_flag("--print-config", print_config, "print the resolved config and exit");

    auto* train = app.add_subcommand("train", "train the B-DNN classifier for every section of a config");
    train->add_option("config", source, "config file or preset name")->required();
    train->add_option("--out", out_path, "model output path (single-section configs)");

    for (auto* sub : {run, train}) {
        sub->add_option("--seed", seed, "master seed override");
        sub->add_option("--feature-mode", feature_mode, "B-DNN feature mode")
            ->check(CLI::IsMember({"signed", "abs"}));
        sub->add_option("--min-errors", min_errors, "stop a point after this many bit errors");
        sub->add_option("--max-bits", max_bits, "stop a point after this many bits");
    }

    auto* plot = app.add_subcommand("plot-data", "split a result CSV into per-series (snr_db, ber) files");
    plot->add_option("csv", source, "result CSV")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", out_path, "output directory (default: alongside the CSV)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (plot->parsed()) {
            const std::filesystem::path csv{source};
            const auto dir = out_path.empty() ? csv.parent_path() / (csv.stem().string() + "_series")
                                              : std::filesystem::path(out_path);
            for (const auto& p : emit_plot_data(csv, dir)) {
                std::cout << p.string() << '\n';
            }
            return 0;
        }

        ExperimentConfig config = resolve_config(source);
        Overrides ov;
        if (*app.get_subcommand(run->parsed() ? "run" : "train")->get_option("--seed")) ov.seed = seed;
        if (!feature_mode.empty()) ov.feature_mode = parse_feature_mode(feature_mode);
        if (min_errors != 0) ov.min_errors = min_errors;
        if (max_bits != 0) ov.max_bits = max_bits;
        if (!model_path.empty()) ov.model_path = model_path;
        ov.workers = workers;
        ov.apply(config);

        if (run->parsed()) {
            if (print_config) {
                std::cout << to_config_text(config);
                return 0;
            }
            const auto rows = run_experiment(config, workers, log_line);
            if (out_path.empty()) {
                write_csv(std::cout, rows);
            } else {
                std::ofstream out(out_path);
                if (!out) {
                    throw ConfigError("cannot write " + out_path);
                }
                write_csv(out, rows);
            }
            return 0;
        }

        // train
        if (!out_path.empty()) {
            if (config.sections.size() != 1) {
                throw ConfigError("--out needs a single-section config; set 'model' per section instead");
            }
            config.sections.front().model_path = out_path;
        }
        for (const auto& section : config.sections) {
            if (!section.model_path) {
                throw ConfigError("[" + section.id + "] no model path: set 'model' or pass --out");
            }
            const auto outcome = train_section(section, log_line);
            save_model(outcome.model, *section.model_path);
            std::ofstream log(section.model_path->string() + ".log.csv");
            write_training_log(log, section, outcome.epoch_losses);
            std::cout << section.model_path->string() << '\n';
        }
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
