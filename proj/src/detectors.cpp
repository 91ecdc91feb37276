#include "rissm/detectors.hpp"

#include <limits>
#include <string>

#include "rissm/errors.hpp"

namespace rissm {

namespace {

void check_received(const ComplexVector& y, std::size_t nr) {
    if (static_cast<std::size_t>(y.size()) != nr) {
        throw ShapeError("received vector has " + std::to_string(y.size()) + " entries, expected Nr=" +
                         std::to_string(nr));
    }
}

}  // namespace

std::size_t nearest_symbol(std::complex<double> z, std::complex<double> gain, const Constellation& c,
                           double* distance) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < c.order(); ++k) {
        const double d = std::norm(z - gain * c.points[k]);
        if (d < best_d) {
            best_d = d;
            best = k;
        }
    }
    if (distance != nullptr) {
        *distance = best_d;
    }
    return best;
}

DetectionResult ml_detect(const ComplexVector& y, const ComplexMatrix& hypotheses, const Constellation& c,
                          Mode mode) {
    const auto nr = static_cast<std::size_t>(hypotheses.rows());
    if (hypotheses.cols() != hypotheses.rows()) {
        throw ShapeError("hypothesis channel matrix must be Nr x Nr");
    }
    check_received(y, nr);
    const std::size_t symbols = mode == Mode::SM ? c.order() : 1;

    DetectionResult best{0, 0, std::numeric_limits<double>::infinity()};
    for (std::size_t m = 0; m < nr; ++m) {
        const auto h = hypotheses.col(static_cast<Eigen::Index>(m));
        for (std::size_t k = 0; k < symbols; ++k) {
            const std::complex<double> x = mode == Mode::SM ? c.points[k] : kSskSymbol;
            const double metric = (y - h * x).squaredNorm();
            if (metric < best.metric) {
                best = {m, k, metric};
            }
        }
    }
    return best;
}

DetectionResult ml_detect(const ComplexVector& y, const ChannelRealization& channel, const Constellation& c,
                          Mode mode) {
    check_received(y, channel.receive_antennas());
    return ml_detect(y, hypothesis_channels(channel), c, mode);
}

DetectionResult greedy_detect(const ComplexVector& y, const ChannelRealization& channel, const Constellation& c,
                              Mode mode) {
    check_received(y, channel.receive_antennas());
    DetectionResult out{0, 0, -1.0};
    for (Eigen::Index l = 0; l < y.size(); ++l) {
        const double energy = std::norm(y(l));
        if (energy > out.metric) {
            out.metric = energy;
            out.antenna = static_cast<std::size_t>(l);
        }
    }
    if (mode == Mode::SM) {
        const double gain = channel.amplitudes.row(static_cast<Eigen::Index>(out.antenna)).sum();
        out.symbol = nearest_symbol(y(static_cast<Eigen::Index>(out.antenna)), gain, c, &out.metric);
    }
    return out;
}

}  // namespace rissm
