#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rissm {

enum class Scheme { BPSK, QPSK, MQAM };

/// RSM sends an antenna index and an M-ary symbol; RSSK sends the antenna index only.
enum class Mode { SM, SSK };

std::string_view to_string(Scheme scheme);
std::string_view to_string(Mode mode);
Scheme parse_scheme(std::string_view text);
Mode parse_mode(std::string_view text);

using Bits = std::vector<std::uint8_t>;

/// Unit-average-energy, Gray-labeled constellation.
/// labels[k] is the integer value of point k's bit label, MSB first.
struct Constellation {
    Scheme scheme = Scheme::BPSK;
    std::vector<std::complex<double>> points;
    std::vector<std::uint32_t> labels;

    std::size_t order() const noexcept { return points.size(); }
    unsigned bits_per_symbol() const noexcept;
    /// Point index whose label equals `label`.
    std::size_t index_of_label(std::uint32_t label) const;
};

/// BPSK (M=2), QPSK (M=4) or square M-QAM (M in {4, 16, 64}).
Constellation build_constellation(Scheme scheme, std::size_t order);

/// One transmission: receive-antenna index and symbol index (both zero-based).
/// In SSK mode the symbol index is always 0.
struct Frame {
    std::size_t antenna = 0;
    std::size_t symbol = 0;

    friend bool operator==(const Frame&, const Frame&) = default;
};

/// The single symbol every SSK frame carries.
inline constexpr std::complex<double> kSskSymbol{1.0, 0.0};

unsigned log2_exact(std::size_t value);
bool is_power_of_two(std::size_t value) noexcept;

/// log2(Nr) + log2(M) for SM, log2(Nr) for SSK.
std::size_t bits_per_frame(std::size_t nr, const Constellation& c, Mode mode);

/// Leading log2(Nr) bits pick the antenna (natural binary, MSB first); the rest are a Gray symbol label.
Frame bits_to_frame(const Bits& bits, std::size_t nr, const Constellation& c, Mode mode);
Bits frame_to_bits(const Frame& frame, std::size_t nr, const Constellation& c, Mode mode);

/// Transmitted complex symbol for the frame.
std::complex<double> frame_symbol(const Frame& frame, const Constellation& c, Mode mode);

}  // namespace rissm
