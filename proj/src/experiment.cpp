#include "rissm/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "rissm/errors.hpp"
#include "rissm/model_io.hpp"

namespace rissm {

namespace pt = boost::property_tree;

namespace {

std::string fmt_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (true) {
        const auto next = s.find(sep, pos);
        out.push_back(trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) {
            return out;
        }
        pos = next + 1;
    }
}

// Values are parsed key by key so every diagnostic names its section and key.
class KeyReader {
public:
    KeyReader(std::string section, std::string key, std::string value)
        : section_(std::move(section)), key_(std::move(key)), value_(std::move(value)) {}

    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError("[" + section_ + "] key '" + key_ + "' = '" + value_ + "': " + why);
    }

    double real() const {
        double v = 0.0;
        const auto res = std::from_chars(value_.data(), value_.data() + value_.size(), v);
        if (res.ec != std::errc{} || res.ptr != value_.data() + value_.size() || !std::isfinite(v)) {
            fail("expected a finite number");
        }
        return v;
    }

    std::uint64_t count() const {
        std::uint64_t v = 0;
        const auto res = std::from_chars(value_.data(), value_.data() + value_.size(), v);
        if (res.ec != std::errc{} || res.ptr != value_.data() + value_.size()) {
            fail("expected a non-negative integer");
        }
        return v;
    }

    bool flag() const {
        if (value_ == "true" || value_ == "1" || value_ == "yes") return true;
        if (value_ == "false" || value_ == "0" || value_ == "no") return false;
        fail("expected true or false");
    }

    template <typename Fn>
    auto parsed(Fn&& fn) const {
        try {
            return fn(value_);
        } catch (const ConfigError& e) {
            fail(e.what());
        }
    }

    const std::string& text() const { return value_; }

private:
    std::string section_;
    std::string key_;
    std::string value_;
};

struct SectionDraft {
    ExperimentSection section;
    std::optional<double> train_snr_start;
    std::optional<double> train_snr_stop;
};

void apply_key(SectionDraft& draft, const std::string& key, const KeyReader& r) {
    auto& s = draft.section;
    auto& sc = s.scenario;
    if (key == "mode") {
        sc.mode = r.parsed([](const std::string& v) { return parse_mode(v); });
    } else if (key == "scheme") {
        sc.scheme = r.parsed([](const std::string& v) { return parse_scheme(v); });
        if (sc.scheme == Scheme::BPSK) sc.order = 2;
        if (sc.scheme == Scheme::QPSK) sc.order = 4;
        if (sc.scheme == Scheme::MQAM && sc.order < 16) sc.order = 16;
    } else if (key == "M") {
        sc.order = r.count();
    } else if (key == "nr") {
        sc.nr = r.count();
    } else if (key == "n") {
        sc.n = r.count();
    } else if (key == "alpha") {
        sc.fading.shape = r.real();
    } else if (key == "omega") {
        sc.fading.power = r.real();
    } else if (key == "feature_mode") {
        sc.feature_mode = r.parsed([](const std::string& v) { return parse_feature_mode(v); });
    } else if (key == "detectors") {
        s.detectors.clear();
        for (const auto& item : split(r.text(), ',')) {
            s.detectors.push_back(r.parsed([&](const std::string&) { return parse_detector(item); }));
        }
    } else if (key == "snr_start") {
        s.grid.start = r.real();
    } else if (key == "snr_stop") {
        s.grid.stop = r.real();
    } else if (key == "snr_step") {
        s.grid.step = r.real();
    } else if (key == "min_errors") {
        s.stop.min_bit_errors = r.count();
    } else if (key == "max_bits") {
        s.stop.max_bits = r.count();
    } else if (key == "seed") {
        s.seed = r.count();
    } else if (key == "model") {
        s.model_path = r.text();
    } else if (key == "train_on_demand") {
        s.train_on_demand = r.flag();
    } else if (key == "train_lr") {
        s.training.learning_rate = r.real();
    } else if (key == "train_epochs") {
        s.training.epochs = r.count();
    } else if (key == "train_batch") {
        s.training.batch_size = r.count();
    } else if (key == "train_size") {
        s.training.dataset_size = r.count();
    } else if (key == "train_snr_start") {
        draft.train_snr_start = r.real();
    } else if (key == "train_snr_stop") {
        draft.train_snr_stop = r.real();
    } else if (key == "train_seed") {
        s.training.seed = r.count();
    } else {
        r.fail("unknown key");
    }
}

void finish_section(SectionDraft& draft) {
    auto& s = draft.section;
    const auto where = [&](const std::string& why) { return ConfigError("[" + s.id + "] " + why); };
    try {
        s.grid.validate();
        s.scenario.validate();
        s.stop.validate();
        if (s.detectors.empty()) {
            throw ConfigError("no detectors listed");
        }
        s.training.snr_min_db = draft.train_snr_start.value_or(std::min(s.grid.start, s.grid.stop));
        s.training.snr_max_db = draft.train_snr_stop.value_or(std::max(s.grid.start, s.grid.stop));
        s.training.feature_mode = s.scenario.feature_mode;
        s.training.validate();
    } catch (const ConfigError& e) {
        throw where(e.what());
    } catch (const ParameterError& e) {
        throw where(e.what());
    }
}

}  // namespace

void SnrGrid::validate() const {
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step)) {
        throw ConfigError("SNR grid values must be finite");
    }
    if (step == 0.0) {
        throw ConfigError("snr_step must be non-zero");
    }
    if ((stop - start) * step < 0.0) {
        throw ConfigError("snr_step points away from snr_stop");
    }
    if (std::abs((stop - start) / step) > 10000.0) {
        throw ConfigError("SNR grid has more than 10000 points");
    }
}

std::vector<double> SnrGrid::points() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> out;
    out.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
        out.push_back(start + static_cast<double>(k) * step);
    }
    return out;
}

ExperimentConfig parse_config(std::string_view text) {
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
    }

    // section names in file order (read_ini omits empty sections)
    std::vector<std::string> headers;
    {
        std::istringstream in{std::string(text)};
        std::string line;
        while (std::getline(in, line)) {
            const std::string t = trim(line);
            if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
                headers.push_back(trim(t.substr(1, t.size() - 2)));
            }
        }
    }

    SectionDraft defaults;
    defaults.section.id = "defaults";
    for (const auto& [key, node] : tree) {
        if (std::find(headers.begin(), headers.end(), key) == headers.end()) {
            apply_key(defaults, key, KeyReader("global", key, trim(node.data())));
        }
    }
    const pt::ptree empty;
    std::vector<std::pair<std::string, const pt::ptree*>> sections;
    for (const auto& name : headers) {
        const auto child = tree.find(name);
        sections.emplace_back(name, child == tree.not_found() ? &empty : &child->second);
    }
    if (sections.empty()) {
        throw ConfigError("config defines no [experiment] sections");
    }
    ExperimentConfig config;
    for (const auto& [name, node] : sections) {
        SectionDraft draft = defaults;
        draft.section.id = name;
        for (const auto& [key, leaf] : *node) {
            apply_key(draft, key, KeyReader(name, key, trim(leaf.data())));
        }
        finish_section(draft);
        config.sections.push_back(std::move(draft.section));
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string to_config_text(const ExperimentConfig& config) {
    std::ostringstream out;
    for (const auto& s : config.sections) {
        const auto& sc = s.scenario;
        out << '[' << s.id << "]\n";
        out << "mode = " << to_string(sc.mode) << '\n';
        out << "scheme = " << to_string(sc.scheme) << '\n';
        out << "M = " << sc.order << '\n';
        out << "nr = " << sc.nr << '\n';
        out << "n = " << sc.n << '\n';
        out << "alpha = " << fmt_double(sc.fading.shape) << '\n';
        out << "omega = " << fmt_double(sc.fading.power) << '\n';
        out << "feature_mode = " << to_string(sc.feature_mode) << '\n';
        out << "detectors = ";
        for (std::size_t k = 0; k < s.detectors.size(); ++k) {
            out << (k ? ", " : "") << to_string(s.detectors[k]);
        }
        out << '\n';
        out << "snr_start = " << fmt_double(s.grid.start) << '\n';
        out << "snr_stop = " << fmt_double(s.grid.stop) << '\n';
        out << "snr_step = " << fmt_double(s.grid.step) << '\n';
        out << "min_errors = " << s.stop.min_bit_errors << '\n';
        out << "max_bits = " << s.stop.max_bits << '\n';
        out << "seed = " << s.seed << '\n';
        if (s.model_path) {
            out << "model = " << s.model_path->string() << '\n';
        }
        out << "train_on_demand = " << (s.train_on_demand ? "true" : "false") << '\n';
        out << "train_lr = " << fmt_double(s.training.learning_rate) << '\n';
        out << "train_epochs = " << s.training.epochs << '\n';
        out << "train_batch = " << s.training.batch_size << '\n';
        out << "train_size = " << s.training.dataset_size << '\n';
        out << "train_snr_start = " << fmt_double(s.training.snr_min_db) << '\n';
        out << "train_snr_stop = " << fmt_double(s.training.snr_max_db) << '\n';
        out << "train_seed = " << s.training.seed << "\n\n";
    }
    return out.str();
}

bool is_preset(std::string_view name) {
    return name == "fig3" || name == "fig4" || name == "fig5" || name == "fig6";
}

std::string preset_text(std::string_view name) {
    // Shared by every preset: Weibull severity 1.2, unit fading power, all three detectors.
    const std::string common =
        "alpha = 1.2\n"
        "omega = 1\n"
        "detectors = ML, GREEDY, BDNN\n"
        "snr_start = -40\n"
        "snr_stop = 0\n"
        "snr_step = 2\n";
    if (name == "fig3") {
        return "# RIS-SM, varying N (Nr = 4, M = 4)\n"
               "mode = SM\nscheme = QPSK\nM = 4\nnr = 4\n" +
               common + "\n[fig3_n32]\nn = 32\n\n[fig3_n64]\nn = 64\n\n[fig3_n128]\nn = 128\n";
    }
    if (name == "fig4") {
        return "# RIS-SSK, varying N (Nr = 4)\n"
               "mode = SSK\nnr = 4\n" +
               common + "\n[fig4_n32]\nn = 32\n\n[fig4_n64]\nn = 64\n\n[fig4_n128]\nn = 128\n";
    }
    if (name == "fig5") {
        // M is not given for this figure; M = 4 as in fig3
        return "# RIS-SM, varying Nr (N = 64, M = 4)\n"
               "mode = SM\nscheme = QPSK\nM = 4\nn = 64\n" +
               common + "\n[fig5_nr2]\nnr = 2\n\n[fig5_nr4]\nnr = 4\n\n[fig5_nr8]\nnr = 8\n";
    }
    if (name == "fig6") {
        return "# RIS-SSK, varying Nr (N = 64)\n"
               "mode = SSK\nn = 64\n" +
               common + "\n[fig6_nr2]\nnr = 2\n\n[fig6_nr4]\nnr = 4\n\n[fig6_nr8]\nnr = 8\n";
    }
    throw ConfigError("unknown preset '" + std::string(name) + "' (expected fig3, fig4, fig5 or fig6)");
}

ExperimentConfig preset_config(std::string_view name) { return parse_config(preset_text(name)); }

void Overrides::apply(ExperimentConfig& config) const {
    for (auto& s : config.sections) {
        if (seed) {
            s.seed = *seed;
            s.training.seed = *seed;
        }
        if (feature_mode) {
            s.scenario.feature_mode = *feature_mode;
            s.training.feature_mode = *feature_mode;
        }
        if (min_errors) s.stop.min_bit_errors = *min_errors;
        if (max_bits) s.stop.max_bits = *max_bits;
        if (model_path) {
            // one model per section: x.model -> x_<id>.model when there are several
            s.model_path = config.sections.size() == 1
                               ? *model_path
                               : model_path->parent_path() /
                                     (model_path->stem().string() + "_" + s.id + model_path->extension().string());
        }
        s.stop.validate();
    }
}

std::string format_csv_row(const CsvRow& row) {
    std::string out;
    out += row.scenario_id + ',' + row.detector + ',' + row.mode + ',';
    out += std::to_string(row.n) + ',' + std::to_string(row.nr) + ',' + std::to_string(row.m) + ',';
    out += fmt_double(row.alpha) + ',' + fmt_double(row.omega) + ',' + fmt_double(row.snr_db) + ',';
    out += std::to_string(row.bits) + ',' + std::to_string(row.errors) + ',' + fmt_double(row.ber) + ',';
    out += std::to_string(row.seed);
    return out;
}

void write_csv(std::ostream& out, const std::vector<CsvRow>& rows) {
    out << kCsvVersionLine << '\n' << kCsvHeader << '\n';
    for (const auto& row : rows) {
        out << format_csv_row(row) << '\n';
    }
}

BdnnModel obtain_model(const ExperimentSection& section, const ProgressFn& progress) {
    if (section.model_path && std::filesystem::exists(*section.model_path)) {
        BdnnModel model = load_model(*section.model_path);
        model.check_compatible(section.scenario);
        return model;
    }
    if (!section.train_on_demand) {
        throw ConfigError("[" + section.id + "] B-DNN needs a trained model: " +
                          (section.model_path ? section.model_path->string() + " does not exist"
                                              : std::string("no model path given")) +
                          " and train_on_demand is false");
    }
    TrainingOutcome trained = train_section(section, progress);
    if (section.model_path) {
        save_model(trained.model, *section.model_path);
    }
    return std::move(trained.model);
}

std::vector<CsvRow> run_experiment(const ExperimentConfig& config, unsigned workers, const ProgressFn& progress) {
    // resolve referenced files before any simulation time is spent
    for (const auto& s : config.sections) {
        const bool needs_model = s.scenario.mode == Mode::SM &&
                                 std::find(s.detectors.begin(), s.detectors.end(), DetectorKind::BDNN) !=
                                     s.detectors.end();
        if (needs_model && !s.train_on_demand && !(s.model_path && std::filesystem::exists(*s.model_path))) {
            throw ConfigError("[" + s.id + "] B-DNN model missing and train_on_demand is false");
        }
    }

    std::vector<CsvRow> rows;
    for (const auto& s : config.sections) {
        const std::vector<double> snrs = s.grid.points();
        const Constellation c = s.scenario.constellation();
        for (const DetectorKind det : s.detectors) {
            Scenario sc = s.scenario;
            sc.detector = det;
            std::optional<BdnnModel> model;
            if (det == DetectorKind::BDNN && sc.mode == Mode::SM) {
                model = obtain_model(s, progress);
            }
            if (progress) {
                progress("[" + s.id + "] " + std::string(to_string(det)) + ": " + std::to_string(snrs.size()) +
                         " SNR points");
            }
            const auto records = sweep(sc, snrs, s.stop, s.seed, model ? &*model : nullptr, {workers, false});
            for (const auto& rec : records) {
                rows.push_back({s.id, std::string(to_string(det)), std::string(to_string(sc.mode)), sc.n, sc.nr,
                                c.order(), sc.fading.shape, sc.fading.power, rec.snr_db, rec.bits_sent,
                                rec.bit_errors, rec.ber, rec.seed});
            }
        }
    }
    return rows;
}

TrainingOutcome train_section(const ExperimentSection& section, const ProgressFn& progress) {
    if (section.scenario.mode != Mode::SM) {
        throw ConfigError("[" + section.id + "] SSK scenarios have no symbol classifier to train");
    }
    TrainingOutcome out;
    TrainingConfig cfg = section.training;
    cfg.feature_mode = section.scenario.feature_mode;
    out.model = train_bdnn(section.scenario, cfg, [&](std::size_t epoch, double loss) {
        out.epoch_losses.push_back(loss);
        if (progress) {
            progress("[" + section.id + "] epoch " + std::to_string(epoch) + "/" + std::to_string(cfg.epochs) +
                     " mean loss " + fmt_double(loss));
        }
    });
    return out;
}

void write_training_log(std::ostream& out, const ExperimentSection& section, const std::vector<double>& losses) {
    const auto& sc = section.scenario;
    const auto& t = section.training;
    const auto sizes = network_layout(sc.scheme, sc.order, sc.nr);
    out << "# scenario " << sc.fingerprint() << '\n';
    out << "# layers";
    for (auto size : sizes) {
        out << ' ' << size;
    }
    out << '\n';
    out << "# learning_rate " << fmt_double(t.learning_rate) << '\n';
    out << "# epochs " << t.epochs << " batch " << t.batch_size << " dataset " << t.dataset_size << '\n';
    out << "# snr_range_db " << fmt_double(t.snr_min_db) << ' ' << fmt_double(t.snr_max_db) << '\n';
    out << "# seed " << t.seed << " feature_mode " << to_string(sc.feature_mode) << '\n';
    out << "epoch,mean_loss\n";
    for (std::size_t k = 0; k < losses.size(); ++k) {
        out << (k + 1) << ',' << fmt_double(losses[k]) << '\n';
    }
}

std::vector<PlotSeries> read_plot_series(std::istream& in) {
    std::vector<PlotSeries> series;
    std::string line;
    std::size_t lineno = 0;
    bool header_seen = false;
    const auto header = split(kCsvHeader, ',');
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto fields = split(line, ',');
        if (!header_seen) {
            if (fields != header) {
                throw FormatError("line " + std::to_string(lineno) + ": expected header '" +
                                  std::string(kCsvHeader) + "'");
            }
            header_seen = true;
            continue;
        }
        if (fields.size() != header.size()) {
            throw FormatError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                              " fields, found " + std::to_string(fields.size()));
        }
        for (std::size_t k : {8u, 11u}) {
            double v = 0.0;
            const auto& f = fields[k];
            const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || res.ec != std::errc{} || res.ptr != f.data() + f.size()) {
                throw FormatError("line " + std::to_string(lineno) + ": column '" + header[k] +
                                  "' is not a number");
            }
        }
        auto it = std::find_if(series.begin(), series.end(), [&](const PlotSeries& s) {
            return s.scenario_id == fields[0] && s.detector == fields[1];
        });
        if (it == series.end()) {
            series.push_back({fields[0], fields[1], {}});
            it = std::prev(series.end());
        }
        it->points.emplace_back(fields[8], fields[11]);
    }
    if (!header_seen) {
        throw FormatError("line " + std::to_string(lineno + 1) + ": missing CSV header");
    }
    if (series.empty()) {
        throw FormatError("line " + std::to_string(lineno + 1) + ": CSV has no data rows");
    }
    return series;
}

void write_plot_series(std::ostream& out, const PlotSeries& series) {
    out << "# scenario " << series.scenario_id << " detector " << series.detector << '\n';
    std::string zeros;
    for (const auto& [snr, ber] : series.points) {
        double v = 1.0;
        std::from_chars(ber.data(), ber.data() + ber.size(), v);
        if (v == 0.0) {
            zeros += (zeros.empty() ? "" : " ") + snr;
        }
    }
    if (!zeros.empty()) {
        out << "# zero-ber points (no errors observed; omit on log axes): " << zeros << '\n';
    }
    out << "# snr_db ber\n";
    for (const auto& [snr, ber] : series.points) {
        out << snr << ' ' << ber << '\n';
    }
}

std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& csv_path,
                                                  const std::filesystem::path& out_dir) {
    std::ifstream in(csv_path);
    if (!in) {
        throw FormatError("cannot open CSV file " + csv_path.string());
    }
    const auto all = read_plot_series(in);
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (const auto& s : all) {
        const auto path = out_dir / (s.scenario_id + "_" + s.detector + ".dat");
        std::ofstream out(path);
        if (!out) {
            throw FormatError("cannot write " + path.string());
        }
        write_plot_series(out, s);
        written.push_back(path);
    }
    return written;
}

}  // namespace rissm
