#include "rissm/modulation.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>

#include "rissm/errors.hpp"

namespace rissm {

namespace {

std::uint32_t gray(std::uint32_t v) noexcept { return v ^ (v >> 1); }

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char ch) { return std::toupper(ch); });
    return out;
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::BPSK: return "BPSK";
        case Scheme::QPSK: return "QPSK";
        case Scheme::MQAM: return "QAM";
    }
    return "?";
}

std::string_view to_string(Mode mode) { return mode == Mode::SM ? "SM" : "SSK"; }

Scheme parse_scheme(std::string_view text) {
    const auto s = upper(text);
    if (s == "BPSK") return Scheme::BPSK;
    if (s == "QPSK") return Scheme::QPSK;
    if (s == "QAM" || s == "MQAM") return Scheme::MQAM;
    throw ConfigError("unknown modulation scheme '" + std::string(text) + "'");
}

Mode parse_mode(std::string_view text) {
    const auto s = upper(text);
    if (s == "SM" || s == "RSM") return Mode::SM;
    if (s == "SSK" || s == "RSSK") return Mode::SSK;
    throw ConfigError("unknown mode '" + std::string(text) + "' (expected SM or SSK)");
}

bool is_power_of_two(std::size_t value) noexcept { return std::has_single_bit(value); }

unsigned log2_exact(std::size_t value) {
    if (!is_power_of_two(value)) {
        throw ConfigError(std::to_string(value) + " is not a power of two");
    }
    return static_cast<unsigned>(std::countr_zero(value));
}

unsigned Constellation::bits_per_symbol() const noexcept {
    return static_cast<unsigned>(std::countr_zero(points.size()));
}

std::size_t Constellation::index_of_label(std::uint32_t label) const {
    const auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw IndexError("no constellation point carries label " + std::to_string(label));
    }
    return static_cast<std::size_t>(it - labels.begin());
}

Constellation build_constellation(Scheme scheme, std::size_t order) {
    Constellation c;
    c.scheme = scheme;
    switch (scheme) {
        case Scheme::BPSK:
            if (order != 2) {
                throw ConfigError("BPSK requires M=2, got M=" + std::to_string(order));
            }
            c.points = {{1.0, 0.0}, {-1.0, 0.0}};
            c.labels = {0, 1};
            return c;
        case Scheme::QPSK:
            if (order != 4) {
                throw ConfigError("QPSK requires M=4, got M=" + std::to_string(order));
            }
            break;
        case Scheme::MQAM:
            if (order != 4 && order != 16 && order != 64) {
                throw ConfigError("square QAM requires M in {4, 16, 64}, got M=" + std::to_string(order));
            }
            break;
    }

    // Square QAM: each axis is a Gray-coded PAM with levels -(s-1), ..., s-1.
    // The I axis carries the high half of the label, Q the low half.
    const auto side = static_cast<std::uint32_t>(std::lround(std::sqrt(static_cast<double>(order))));
    const unsigned half_bits = static_cast<unsigned>(std::countr_zero(side));
    const double norm = std::sqrt(2.0 * (static_cast<double>(order) - 1.0) / 3.0);
    c.points.reserve(order);
    c.labels.reserve(order);
    for (std::uint32_t i = 0; i < side; ++i) {
        for (std::uint32_t q = 0; q < side; ++q) {
            const double re = (2.0 * i - (side - 1.0)) / norm;
            const double im = (2.0 * q - (side - 1.0)) / norm;
            c.points.emplace_back(re, im);
            c.labels.push_back((gray(i) << half_bits) | gray(q));
        }
    }
    return c;
}

std::size_t bits_per_frame(std::size_t nr, const Constellation& c, Mode mode) {
    const std::size_t antenna_bits = log2_exact(nr);
    return mode == Mode::SM ? antenna_bits + c.bits_per_symbol() : antenna_bits;
}

Frame bits_to_frame(const Bits& bits, std::size_t nr, const Constellation& c, Mode mode) {
    const std::size_t expected = bits_per_frame(nr, c, mode);
    if (bits.size() != expected) {
        throw ShapeError("frame needs " + std::to_string(expected) + " bits, got " + std::to_string(bits.size()));
    }
    const unsigned antenna_bits = log2_exact(nr);
    Frame f;
    for (unsigned k = 0; k < antenna_bits; ++k) {
        f.antenna = (f.antenna << 1) | (bits[k] & 1u);
    }
    if (mode == Mode::SM) {
        std::uint32_t label = 0;
        for (std::size_t k = antenna_bits; k < bits.size(); ++k) {
            label = (label << 1) | (bits[k] & 1u);
        }
        f.symbol = c.index_of_label(label);
    }
    return f;
}

Bits frame_to_bits(const Frame& frame, std::size_t nr, const Constellation& c, Mode mode) {
    if (frame.antenna >= nr) {
        throw IndexError("antenna index " + std::to_string(frame.antenna) + " out of range for Nr=" +
                         std::to_string(nr));
    }
    const unsigned antenna_bits = log2_exact(nr);
    Bits bits;
    bits.reserve(bits_per_frame(nr, c, mode));
    for (unsigned k = antenna_bits; k-- > 0;) {
        bits.push_back(static_cast<std::uint8_t>((frame.antenna >> k) & 1u));
    }
    if (mode == Mode::SM) {
        if (frame.symbol >= c.order()) {
            throw IndexError("symbol index " + std::to_string(frame.symbol) + " out of range for M=" +
                             std::to_string(c.order()));
        }
        const std::uint32_t label = c.labels[frame.symbol];
        for (unsigned k = c.bits_per_symbol(); k-- > 0;) {
            bits.push_back(static_cast<std::uint8_t>((label >> k) & 1u));
        }
    } else if (frame.symbol != 0) {
        throw IndexError("SSK frames carry no symbol index");
    }
    return bits;
}

std::complex<double> frame_symbol(const Frame& frame, const Constellation& c, Mode mode) {
    if (mode == Mode::SSK) {
        return kSskSymbol;
    }
    if (frame.symbol >= c.order()) {
        throw IndexError("symbol index " + std::to_string(frame.symbol) + " out of range");
    }
    return c.points[frame.symbol];
}

}  // namespace rissm
