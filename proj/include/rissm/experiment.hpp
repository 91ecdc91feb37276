#pragma once

// Configuration-driven experiments: INI-style config files, built-in figure
// presets, CSV result files and per-series plot data.
//
// Config syntax (one experiment per [section]; keys before the first section
// are defaults inherited by every section):
//
//   mode = SM            # SM | SSK
//   scheme = QPSK        # BPSK | QPSK | QAM
//   M = 4
//   nr = 4
//   alpha = 1.2
//   omega = 1
//   detectors = ML, GREEDY, BDNN
//   snr_start = -40
//   snr_stop = 0
//   snr_step = 2
//
//   [n32]
//   n = 32

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rissm/bdnn.hpp"
#include "rissm/harness.hpp"
#include "rissm/scenario.hpp"

namespace rissm {

struct SnrGrid {
    double start = -40.0;
    double stop = 0.0;
    double step = 2.0;

    void validate() const;
    /// start, start+step, ... up to stop inclusive (with a small tolerance).
    std::vector<double> points() const;
};

struct ExperimentSection {
    std::string id;
    Scenario scenario;  ///< `detector` is taken from `detectors`
    std::vector<DetectorKind> detectors{DetectorKind::ML, DetectorKind::GREEDY, DetectorKind::BDNN};
    SnrGrid grid;
    StoppingRule stop;
    std::uint64_t seed = 1;
    std::optional<std::filesystem::path> model_path;
    bool train_on_demand = true;
    TrainingConfig training;  ///< SNR range defaults to the sweep range
};

struct ExperimentConfig {
    std::vector<ExperimentSection> sections;
};

/// Throws ConfigError naming the line (syntax) or the section/key (values).
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Serializes every key explicitly; parse_config(to_config_text(c)) reproduces c.
std::string to_config_text(const ExperimentConfig& config);

/// fig3 (SM, varying N), fig4 (SSK, varying N), fig5 (SM, varying Nr), fig6 (SSK, varying Nr).
bool is_preset(std::string_view name);
std::string preset_text(std::string_view name);
ExperimentConfig preset_config(std::string_view name);

/// Command-line overrides applied on top of the config.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<FeatureMode> feature_mode;
    std::optional<std::uint64_t> min_errors;
    std::optional<std::uint64_t> max_bits;
    /// With several sections, section `id` gets `<stem>_<id><ext>`.
    std::optional<std::filesystem::path> model_path;
    unsigned workers = 0;

    void apply(ExperimentConfig& config) const;
};

inline constexpr std::string_view kCsvVersionLine = "# rissm-ber-csv v1";
inline constexpr std::string_view kCsvHeader = "scenario_id,detector,mode,N,Nr,M,alpha,omega,snr_db,bits,errors,ber,seed";

struct CsvRow {
    std::string scenario_id;
    std::string detector;
    std::string mode;
    std::size_t n = 0;
    std::size_t nr = 0;
    std::size_t m = 0;
    double alpha = 0.0;
    double omega = 0.0;
    double snr_db = 0.0;
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
    double ber = 0.0;
    std::uint64_t seed = 0;
};

std::string format_csv_row(const CsvRow& row);
void write_csv(std::ostream& out, const std::vector<CsvRow>& rows);

using ProgressFn = std::function<void(const std::string&)>;

/// Trains (or loads) the B-DNN model for one section.
BdnnModel obtain_model(const ExperimentSection& section, const ProgressFn& progress = {});

/// All detector x SNR rows for every section, in config order.
std::vector<CsvRow> run_experiment(const ExperimentConfig& config, unsigned workers = 0,
                                   const ProgressFn& progress = {});

struct TrainingOutcome {
    BdnnModel model;
    std::vector<double> epoch_losses;
};

TrainingOutcome train_section(const ExperimentSection& section, const ProgressFn& progress = {});
/// Header comments record the configuration, then `epoch,mean_loss` with one row per epoch.
void write_training_log(std::ostream& out, const ExperimentSection& section, const std::vector<double>& losses);

/// One (snr_db, ber) series per (scenario_id, detector), values kept as the exact source text.
struct PlotSeries {
    std::string scenario_id;
    std::string detector;
    std::vector<std::pair<std::string, std::string>> points;
};

/// Throws FormatError with the 1-based line number on malformed input.
std::vector<PlotSeries> read_plot_series(std::istream& in);
void write_plot_series(std::ostream& out, const PlotSeries& series);
/// Writes `<scenario_id>_<detector>.dat` files into `out_dir`; returns their paths.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv_path,
                                                  const std::filesystem::path& out_dir);

}  // namespace rissm
