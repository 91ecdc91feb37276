#include <gtest/gtest.h>

#include <bit>
#include <cmath>
#include <set>

#include "rissm/errors.hpp"
#include "rissm/modulation.hpp"

using namespace rissm;

namespace {

Bits to_bits(std::uint32_t value, std::size_t width) {
    Bits b(width);
    for (std::size_t k = 0; k < width; ++k) {
        b[k] = static_cast<std::uint8_t>((value >> (width - 1 - k)) & 1u);
    }
    return b;
}

// Every pair of points at the minimum Euclidean distance must differ in exactly one label bit.
void expect_gray(const Constellation& c) {
    double dmin = 1e300;
    for (std::size_t a = 0; a < c.order(); ++a) {
        for (std::size_t b = a + 1; b < c.order(); ++b) {
            dmin = std::min(dmin, std::abs(c.points[a] - c.points[b]));
        }
    }
    int neighbours = 0;
    for (std::size_t a = 0; a < c.order(); ++a) {
        for (std::size_t b = a + 1; b < c.order(); ++b) {
            if (std::abs(c.points[a] - c.points[b]) < dmin * (1 + 1e-9)) {
                ++neighbours;
                EXPECT_EQ(std::popcount(c.labels[a] ^ c.labels[b]), 1) << "points " << a << " and " << b;
            }
        }
    }
    EXPECT_GT(neighbours, 0);
}

}  // namespace

TEST(Constellation, Bpsk) {
    const auto c = build_constellation(Scheme::BPSK, 2);
    ASSERT_EQ(c.order(), 2u);
    EXPECT_EQ(c.points[0], std::complex<double>(1.0, 0.0));
    EXPECT_EQ(c.points[1], std::complex<double>(-1.0, 0.0));
    EXPECT_EQ(c.labels, (std::vector<std::uint32_t>{0, 1}));
}

TEST(Constellation, QpskPointsAndGrayRing) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    ASSERT_EQ(c.order(), 4u);
    const double r = 1.0 / std::sqrt(2.0);
    for (const auto& p : c.points) {
        EXPECT_NEAR(std::abs(p.real()), r, 1e-15);
        EXPECT_NEAR(std::abs(p.imag()), r, 1e-15);
    }
    expect_gray(c);
}

TEST(Constellation, UnitEnergyLabelPermutationAndGray) {
    for (auto [scheme, order] : {std::pair{Scheme::BPSK, 2}, std::pair{Scheme::QPSK, 4}, std::pair{Scheme::MQAM, 4},
                                 std::pair{Scheme::MQAM, 16}, std::pair{Scheme::MQAM, 64}}) {
        const auto c = build_constellation(scheme, static_cast<std::size_t>(order));
        double energy = 0.0;
        for (const auto& p : c.points) {
            energy += std::norm(p);
        }
        EXPECT_NEAR(energy / c.order(), 1.0, 1e-12);
        const std::set<std::uint32_t> labels(c.labels.begin(), c.labels.end());
        EXPECT_EQ(labels.size(), c.order());
        EXPECT_EQ(*labels.rbegin(), c.order() - 1);
        expect_gray(c);
    }
}

TEST(Constellation, RejectsUnsupportedOrders) {
    EXPECT_THROW(build_constellation(Scheme::MQAM, 8), ConfigError);
    EXPECT_THROW(build_constellation(Scheme::MQAM, 32), ConfigError);
    EXPECT_THROW(build_constellation(Scheme::BPSK, 4), ConfigError);
    EXPECT_THROW(build_constellation(Scheme::QPSK, 16), ConfigError);
}

TEST(BitMapping, AllZerosSelectsFirstAntennaAndLabelZero) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    const Frame f = bits_to_frame({0, 0, 0, 0}, 4, c, Mode::SM);
    EXPECT_EQ(f.antenna, 0u);
    EXPECT_EQ(c.labels[f.symbol], 0u);
}

TEST(BitMapping, SskUsesAntennaBitsOnly) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    EXPECT_EQ(bits_to_frame({1, 1}, 4, c, Mode::SSK).antenna, 3u);
    EXPECT_EQ(bits_per_frame(4, c, Mode::SSK), 2u);
    EXPECT_EQ(bits_per_frame(4, c, Mode::SM), 4u);
}

TEST(BitMapping, WrongLengthIsShapeError) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    EXPECT_THROW(bits_to_frame({0, 1, 0}, 4, c, Mode::SM), ShapeError);
    EXPECT_THROW(bits_to_frame({0, 1, 0}, 4, c, Mode::SSK), ShapeError);
}

TEST(BitMapping, FrameToBitsFirstFrame) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    EXPECT_EQ(frame_to_bits({0, c.index_of_label(0)}, 4, c, Mode::SM), (Bits{0, 0, 0, 0}));
}

TEST(BitMapping, OutOfRangeIndicesRejected) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    EXPECT_THROW(frame_to_bits({4, 0}, 4, c, Mode::SM), IndexError);
    EXPECT_THROW(frame_to_bits({0, 4}, 4, c, Mode::SM), IndexError);
}

TEST(BitMapping, ExhaustiveRoundTripSmall) {
    const auto c = build_constellation(Scheme::QPSK, 4);
    for (std::uint32_t v = 0; v < 16; ++v) {
        const Bits b = to_bits(v, 4);
        EXPECT_EQ(frame_to_bits(bits_to_frame(b, 4, c, Mode::SM), 4, c, Mode::SM), b);
    }
    const auto bpsk = build_constellation(Scheme::BPSK, 2);
    for (std::size_t m = 0; m < 8; ++m) {
        for (std::size_t k = 0; k < 2; ++k) {
            const Frame f{m, k};
            EXPECT_EQ(bits_to_frame(frame_to_bits(f, 8, bpsk, Mode::SM), 8, bpsk, Mode::SM), f);
        }
    }
}

// Bijectivity over every input for all configurations with Nr * M <= 1024.
TEST(BitMapping, BijectiveUpTo1024) {
    for (std::size_t nr : {1, 2, 4, 8, 16, 32, 64}) {
        for (auto [scheme, order] : {std::pair{Scheme::BPSK, 2}, std::pair{Scheme::QPSK, 4},
                                     std::pair{Scheme::MQAM, 16}, std::pair{Scheme::MQAM, 64}}) {
            if (nr * static_cast<std::size_t>(order) > 1024) {
                continue;
            }
            const auto c = build_constellation(scheme, static_cast<std::size_t>(order));
            for (Mode mode : {Mode::SM, Mode::SSK}) {
                const std::size_t width = bits_per_frame(nr, c, mode);
                std::set<std::pair<std::size_t, std::size_t>> seen;
                for (std::uint32_t v = 0; v < (1u << width); ++v) {
                    const Bits b = to_bits(v, width);
                    const Frame f = bits_to_frame(b, nr, c, mode);
                    ASSERT_EQ(frame_to_bits(f, nr, c, mode), b);
                    seen.insert({f.antenna, f.symbol});
                }
                EXPECT_EQ(seen.size(), std::size_t{1} << width);
            }
        }
    }
}

TEST(Parsing, SchemeAndMode) {
    EXPECT_EQ(parse_scheme("qpsk"), Scheme::QPSK);
    EXPECT_EQ(parse_scheme("QAM"), Scheme::MQAM);
    EXPECT_EQ(parse_mode("ssk"), Mode::SSK);
    EXPECT_THROW(parse_scheme("8PSK"), ConfigError);
    EXPECT_THROW(parse_mode("OFDM"), ConfigError);
}
