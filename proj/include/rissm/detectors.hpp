#pragma once

#include <cstddef>

#include "rissm/channel.hpp"
#include "rissm/modulation.hpp"

namespace rissm {

struct DetectionResult {
    std::size_t antenna = 0;
    std::size_t symbol = 0;
    double metric = 0.0;  ///< winning metric value, for diagnostics

    Frame frame() const noexcept { return Frame{antenna, symbol}; }
};

/// Exhaustive search over (antenna, symbol):
///   argmin sum_l |y_l - h^(m)_l x|^2
/// where h^(m) is the effective channel with the RIS aligned to antenna m.
/// Ties go to the lowest antenna, then the lowest symbol.
DetectionResult ml_detect(const ComplexVector& y, const ChannelRealization& channel, const Constellation& c,
                          Mode mode);

/// Same search with the hypothesis channels already computed (column m = h^(m)).
DetectionResult ml_detect(const ComplexVector& y, const ComplexMatrix& hypotheses, const Constellation& c,
                          Mode mode);

/// Energy-based antenna pick followed by scalar nearest-symbol search using
/// the coherent gain sum_i beta[m_hat,i]. SSK stops after the antenna pick.
DetectionResult greedy_detect(const ComplexVector& y, const ChannelRealization& channel, const Constellation& c,
                              Mode mode);

/// Index of the point nearest to `z` scaled by `gain` (lowest index on ties).
std::size_t nearest_symbol(std::complex<double> z, std::complex<double> gain, const Constellation& c,
                           double* distance = nullptr);

}  // namespace rissm
