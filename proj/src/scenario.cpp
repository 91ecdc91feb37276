#include "rissm/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

#include "rissm/errors.hpp"

namespace rissm {

namespace {

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::toupper(ch); });
    return out;
}

}  // namespace

std::string_view to_string(DetectorKind kind) {
    switch (kind) {
        case DetectorKind::ML: return "ML";
        case DetectorKind::GREEDY: return "GREEDY";
        case DetectorKind::BDNN: return "BDNN";
    }
    return "?";
}

std::string_view to_string(FeatureMode mode) { return mode == FeatureMode::SIGNED ? "signed" : "abs"; }

DetectorKind parse_detector(std::string_view text) {
    const auto s = upper(text);
    if (s == "ML") return DetectorKind::ML;
    if (s == "GREEDY") return DetectorKind::GREEDY;
    if (s == "BDNN" || s == "B-DNN") return DetectorKind::BDNN;
    throw ConfigError("unknown detector '" + std::string(text) + "' (expected ML, GREEDY or BDNN)");
}

FeatureMode parse_feature_mode(std::string_view text) {
    const auto s = upper(text);
    if (s == "SIGNED") return FeatureMode::SIGNED;
    if (s == "ABS" || s == "ABSOLUTE") return FeatureMode::ABSOLUTE;
    throw ConfigError("unknown feature mode '" + std::string(text) + "' (expected signed or abs)");
}

void Scenario::validate() const {
    if (nr == 0 || !is_power_of_two(nr)) {
        throw ConfigError("Nr must be a power of two, got " + std::to_string(nr));
    }
    if (n == 0) {
        throw ConfigError("N must be at least 1");
    }
    if (mode == Mode::SM) {
        (void)build_constellation(scheme, order);
    }
    (void)weibull_scale(fading);
    if (fixed_amplitude && !(*fixed_amplitude >= 0.0)) {
        throw ParameterError("fixed amplitude must be non-negative");
    }
}

Constellation Scenario::constellation() const {
    if (mode == Mode::SSK) {
        return Constellation{scheme, {kSskSymbol}, {0}};
    }
    return build_constellation(scheme, order);
}

std::size_t Scenario::bits_per_frame() const {
    return rissm::bits_per_frame(nr, constellation(), mode);
}

std::string Scenario::fingerprint() const {
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s-%s%zu-Nr%zu-N%zu-a%.17g-o%.17g-%s",
                  std::string(to_string(mode)).c_str(),
                  mode == Mode::SM ? std::string(to_string(scheme)).c_str() : "M", mode == Mode::SM ? order : 1,
                  nr, n, fading.shape, fading.power, std::string(to_string(detector)).c_str());
    std::string out(buf);
    if (detector == DetectorKind::BDNN) {
        out += "-";
        out += to_string(feature_mode);
    }
    if (fixed_amplitude) {
        std::snprintf(buf, sizeof buf, "-fixed%.17g", *fixed_amplitude);
        out += buf;
    }
    return out;
}

ChannelRealization draw_channel(const Scenario& s, RandomStream& rng) {
    if (!s.fixed_amplitude) {
        return sample_channel(s.nr, s.n, s.fading, rng);
    }
    ChannelRealization ch{RealMatrix::Constant(s.nr, s.n, *s.fixed_amplitude), RealMatrix(s.nr, s.n)};
    for (Eigen::Index k = 0; k < ch.phases.size(); ++k) {
        ch.phases.data()[k] = rng.phase();
    }
    return ch;
}

}  // namespace rissm
