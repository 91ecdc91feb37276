#include "rissm/model_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <string>

#include "rissm/errors.hpp"

namespace rissm {

static_assert(std::endian::native == std::endian::little, "model files are written in host byte order");

namespace {

constexpr std::array<char, 8> kMagic{'R', 'I', 'S', 'S', 'M', 'N', 'N', '\n'};
constexpr std::uint64_t kMaxLayerWidth = 1u << 20;

template <typename T>
void put(std::ostream& out, T value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof value);
}

template <typename T>
T get(std::istream& in, const char* what) {
    T value{};
    if (!in.read(reinterpret_cast<char*>(&value), sizeof value)) {
        throw FormatError(std::string("model file truncated while reading ") + what);
    }
    return value;
}

void read_doubles(std::istream& in, double* dst, std::size_t count, const char* what) {
    if (!in.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(count * sizeof(double)))) {
        throw FormatError(std::string("model file truncated while reading ") + what);
    }
}

}  // namespace

void write_model(const BdnnModel& model, std::ostream& out) {
    model.params.validate();
    out.write(kMagic.data(), kMagic.size());
    put<std::uint32_t>(out, kModelFormatVersion);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.scheme));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.order));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.nr));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.n));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.feature_mode));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(model.params.layer_sizes.size()));
    for (auto size : model.params.layer_sizes) {
        put<std::uint64_t>(out, size);
    }
    for (std::size_t l = 0; l < model.params.layers(); ++l) {
        const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> w = model.params.weights[l];
        out.write(reinterpret_cast<const char*>(w.data()), static_cast<std::streamsize>(w.size() * sizeof(double)));
        const auto& b = model.params.biases[l];
        out.write(reinterpret_cast<const char*>(b.data()), static_cast<std::streamsize>(b.size() * sizeof(double)));
    }
    if (!out) {
        throw FormatError("failed to write model");
    }
}

BdnnModel read_model(std::istream& in) {
    std::array<char, 8> magic{};
    if (!in.read(magic.data(), magic.size())) {
        throw FormatError("model file truncated while reading magic");
    }
    if (magic != kMagic) {
        throw FormatError("not a model file (bad magic)");
    }
    const auto version = get<std::uint32_t>(in, "version");
    if (version != kModelFormatVersion) {
        throw FormatError("model format version mismatch: expected " + std::to_string(kModelFormatVersion) +
                          ", found " + std::to_string(version));
    }
    BdnnModel model;
    const auto scheme = get<std::uint32_t>(in, "scheme");
    if (scheme > static_cast<std::uint32_t>(Scheme::MQAM)) {
        throw FormatError("unknown scheme tag " + std::to_string(scheme));
    }
    model.scheme = static_cast<Scheme>(scheme);
    model.order = get<std::uint32_t>(in, "M");
    model.nr = get<std::uint32_t>(in, "Nr");
    model.n = get<std::uint32_t>(in, "N");
    const auto feature_mode = get<std::uint32_t>(in, "feature mode");
    if (feature_mode > static_cast<std::uint32_t>(FeatureMode::ABSOLUTE)) {
        throw FormatError("unknown feature mode tag " + std::to_string(feature_mode));
    }
    model.feature_mode = static_cast<FeatureMode>(feature_mode);

    const auto count = get<std::uint32_t>(in, "layer count");
    if (count < 2 || count > 64) {
        throw FormatError("implausible layer count " + std::to_string(count));
    }
    std::vector<std::size_t> sizes;
    for (std::uint32_t k = 0; k < count; ++k) {
        const auto size = get<std::uint64_t>(in, "layer size");
        if (size == 0 || size > kMaxLayerWidth) {
            throw FormatError("implausible layer width " + std::to_string(size));
        }
        sizes.push_back(static_cast<std::size_t>(size));
    }
    model.params = MlpParams::zeros(std::move(sizes));
    for (std::size_t l = 0; l < model.params.layers(); ++l) {
        auto& w = model.params.weights[l];
        Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> row_major(w.rows(), w.cols());
        read_doubles(in, row_major.data(), static_cast<std::size_t>(row_major.size()), "weights");
        w = row_major;
        auto& b = model.params.biases[l];
        read_doubles(in, b.data(), static_cast<std::size_t>(b.size()), "biases");
    }
    if (in.peek() != std::char_traits<char>::eof()) {
        throw FormatError("trailing bytes after model parameters");
    }
    return model;
}

void save_model(const BdnnModel& model, const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::filesystem::create_directories(path.parent_path());
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw FormatError("cannot open " + path.string() + " for writing");
    }
    write_model(model, out);
}

BdnnModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw FormatError("cannot open model file " + path.string());
    }
    return read_model(in);
}

}  // namespace rissm
