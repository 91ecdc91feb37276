#pragma once

// RIS-to-receiver channel model.
//
// The RIS acts as the access point: N passive reflectors illuminate Nr
// receive antennas. The link between receive antenna l and reflector i is
// g[l,i] = beta[l,i] * exp(-j theta[l,i]) with Weibull amplitudes and uniform
// phases. Aligning the RIS to antenna m (Phi_i = theta[m,i]) adds all N paths
// coherently at that antenna.
//
// Antenna and reflector indices are zero-based throughout the library.

#include <complex>
#include <cstddef>

#include <Eigen/Core>

#include "rissm/rng.hpp"

namespace rissm {

using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Weibull fading parameters: shape ("severity") and mean-square amplitude.
struct FadingSpec {
    double shape = 1.2;
    double power = 1.0;
};

/// One block-fading realization: Nr x N amplitudes and phases.
struct ChannelRealization {
    RealMatrix amplitudes;  ///< beta[l,i] >= 0
    RealMatrix phases;      ///< theta[l,i] in [0, 2pi)

    std::size_t receive_antennas() const noexcept { return static_cast<std::size_t>(amplitudes.rows()); }
    std::size_t reflectors() const noexcept { return static_cast<std::size_t>(amplitudes.cols()); }
};

/// Per-reflector phase shifts Phi_i programmed on the RIS.
struct RisPhaseProfile {
    RealVector phases;
};

/// h[l] = sum_i beta[l,i] exp(j(Phi_i - theta[l,i])).
struct EffectiveChannel {
    ComplexVector gains;
};

struct NoiseSpec {
    double n0 = 1.0;  ///< total complex noise variance
    double es = 1.0;  ///< energy per symbol

    /// Es = 1, N0 = 10^(-snr_db/10).
    static NoiseSpec from_snr_db(double snr_db);
};

/// Scale factor lambda such that beta = lambda * W, W ~ Weibull(shape, 1), has E[beta^2] = power.
double weibull_scale(const FadingSpec& fading);

/// One Weibull amplitude draw by inversion.
double sample_weibull_amplitude(double shape, double power, RandomStream& rng);

ChannelRealization sample_channel(std::size_t nr, std::size_t n, const FadingSpec& fading, RandomStream& rng);

/// Profile that co-phases every reflector toward receive antenna `m`.
RisPhaseProfile align_phases(const ChannelRealization& channel, std::size_t m);

EffectiveChannel effective_channel(const ChannelRealization& channel, const RisPhaseProfile& profile);

/// Column m holds effective_channel(channel, align_phases(channel, m)).gains.
/// Equivalent to Nr calls of effective_channel, computed as one matrix product.
ComplexMatrix hypothesis_channels(const ChannelRealization& channel);

/// y = sqrt(Es) h x + n, n ~ CN(0, N0 I). With `noiseless` the noise term is skipped
/// and no random numbers are consumed.
ComplexVector transmit(const EffectiveChannel& h, std::complex<double> x, const NoiseSpec& noise,
                       RandomStream& rng, bool noiseless = false);

/// gamma_m = (sum_i beta[m,i])^2 Es / N0.
double instantaneous_snr(const ChannelRealization& channel, std::size_t m, const NoiseSpec& noise);

}  // namespace rissm
