#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

#include "rissm/channel.hpp"
#include "rissm/modulation.hpp"

namespace rissm {

enum class DetectorKind { ML, GREEDY, BDNN };

/// SIGNED keeps the sign of each real/imaginary component; ABSOLUTE takes |.| of each.
enum class FeatureMode { SIGNED, ABSOLUTE };

std::string_view to_string(DetectorKind kind);
std::string_view to_string(FeatureMode mode);
DetectorKind parse_detector(std::string_view text);
FeatureMode parse_feature_mode(std::string_view text);

struct Scenario {
    Mode mode = Mode::SM;
    std::size_t nr = 4;
    std::size_t n = 64;
    Scheme scheme = Scheme::QPSK;
    std::size_t order = 4;
    FadingSpec fading{};
    DetectorKind detector = DetectorKind::ML;
    FeatureMode feature_mode = FeatureMode::SIGNED;
    /// Test hook: replace Weibull amplitudes with this constant (fading disabled).
    std::optional<double> fixed_amplitude;

    /// Throws ConfigError / ParameterError on an invalid combination.
    void validate() const;
    Constellation constellation() const;
    std::size_t bits_per_frame() const;
    /// Stable identifier of everything that influences the simulated statistics.
    std::string fingerprint() const;
};

/// Draws the block-fading channel for one frame, honoring the fixed-amplitude hook.
ChannelRealization draw_channel(const Scenario& s, RandomStream& rng);

}  // namespace rissm
