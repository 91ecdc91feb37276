#include "rissm/channel.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "rissm/errors.hpp"

namespace rissm {

namespace {

void check_antenna(const ChannelRealization& channel, std::size_t m) {
    if (m >= channel.receive_antennas()) {
        throw IndexError("antenna index " + std::to_string(m) + " out of range for Nr=" +
                         std::to_string(channel.receive_antennas()));
    }
}

void check_fading(double shape, double power) {
    if (!(shape > 0.0) || !std::isfinite(shape)) {
        throw ParameterError("Weibull shape must be positive, got " + std::to_string(shape));
    }
    if (!(power > 0.0) || !std::isfinite(power)) {
        throw ParameterError("Weibull power must be positive, got " + std::to_string(power));
    }
}

}  // namespace

NoiseSpec NoiseSpec::from_snr_db(double snr_db) {
    return NoiseSpec{std::pow(10.0, -snr_db / 10.0), 1.0};
}

double weibull_scale(const FadingSpec& fading) {
    check_fading(fading.shape, fading.power);
    return std::sqrt(fading.power / std::tgamma(1.0 + 2.0 / fading.shape));
}

double sample_weibull_amplitude(double shape, double power, RandomStream& rng) {
    const double scale = weibull_scale({shape, power});
    // 1 - u lies in (0, 1], so the log is finite
    return scale * std::pow(-std::log1p(-rng.uniform()), 1.0 / shape);
}

ChannelRealization sample_channel(std::size_t nr, std::size_t n, const FadingSpec& fading, RandomStream& rng) {
    if (nr == 0 || n == 0) {
        throw ParameterError("channel dimensions must be non-zero");
    }
    const double scale = weibull_scale(fading);
    const double inv_shape = 1.0 / fading.shape;
    ChannelRealization ch{RealMatrix(nr, n), RealMatrix(nr, n)};
    for (Eigen::Index l = 0; l < ch.amplitudes.rows(); ++l) {
        for (Eigen::Index i = 0; i < ch.amplitudes.cols(); ++i) {
            ch.amplitudes(l, i) = scale * std::pow(-std::log1p(-rng.uniform()), inv_shape);
            ch.phases(l, i) = rng.phase();
        }
    }
    return ch;
}

RisPhaseProfile align_phases(const ChannelRealization& channel, std::size_t m) {
    check_antenna(channel, m);
    return RisPhaseProfile{channel.phases.row(static_cast<Eigen::Index>(m)).transpose()};
}

EffectiveChannel effective_channel(const ChannelRealization& channel, const RisPhaseProfile& profile) {
    if (static_cast<std::size_t>(profile.phases.size()) != channel.reflectors()) {
        throw ShapeError("phase profile has " + std::to_string(profile.phases.size()) +
                         " entries, channel has N=" + std::to_string(channel.reflectors()));
    }
    const Eigen::Index nr = channel.amplitudes.rows();
    ComplexVector h = ComplexVector::Zero(nr);
    for (Eigen::Index l = 0; l < nr; ++l) {
        std::complex<double> acc{0.0, 0.0};
        for (Eigen::Index i = 0; i < channel.amplitudes.cols(); ++i) {
            acc += std::polar(channel.amplitudes(l, i), profile.phases(i) - channel.phases(l, i));
        }
        h(l) = acc;
    }
    return EffectiveChannel{std::move(h)};
}

ComplexMatrix hypothesis_channels(const ChannelRealization& channel) {
    // h^(m)_l = sum_i beta[l,i] e^{-j theta[l,i]} e^{j theta[m,i]}  ->  G U^T
    const Eigen::Index nr = channel.amplitudes.rows();
    const Eigen::Index n = channel.amplitudes.cols();
    ComplexMatrix links(nr, n);
    ComplexMatrix steering(nr, n);
    for (Eigen::Index l = 0; l < nr; ++l) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double theta = channel.phases(l, i);
            const std::complex<double> u{std::cos(theta), std::sin(theta)};
            steering(l, i) = u;
            links(l, i) = channel.amplitudes(l, i) * std::conj(u);
        }
    }
    ComplexMatrix h = links * steering.transpose();
    // the aligned entry is a real coherent sum; drop rounding residue in its imaginary part
    for (Eigen::Index m = 0; m < nr; ++m) {
        h(m, m) = {channel.amplitudes.row(m).sum(), 0.0};
    }
    return h;
}

ComplexVector transmit(const EffectiveChannel& h, std::complex<double> x, const NoiseSpec& noise,
                       RandomStream& rng, bool noiseless) {
    if (!(noise.n0 > 0.0) || !(noise.es > 0.0)) {
        throw ParameterError("noise variance and symbol energy must be positive");
    }
    ComplexVector y = h.gains * (std::sqrt(noise.es) * x);
    if (!noiseless) {
        for (Eigen::Index l = 0; l < y.size(); ++l) {
            y(l) += rng.complex_normal(noise.n0);
        }
    }
    return y;
}

double instantaneous_snr(const ChannelRealization& channel, std::size_t m, const NoiseSpec& noise) {
    check_antenna(channel, m);
    const double coherent = channel.amplitudes.row(static_cast<Eigen::Index>(m)).sum();
    return coherent * coherent * noise.es / noise.n0;
}

}  // namespace rissm
