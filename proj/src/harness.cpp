#include "rissm/harness.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "rissm/detectors.hpp"
#include "rissm/errors.hpp"

namespace rissm {

namespace {

constexpr std::uint64_t kChunkTrials = 4096;

std::uint32_t count_bit_errors(const Frame& sent, const Frame& detected, const Scenario& s, const Constellation& c) {
    const Bits a = frame_to_bits(sent, s.nr, c, s.mode);
    const Bits b = frame_to_bits(detected, s.nr, c, s.mode);
    std::uint32_t errors = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        errors += a[k] != b[k] ? 1u : 0u;
    }
    return errors;
}

}  // namespace

void StoppingRule::validate() const {
    if (max_bits == 0) {
        throw ConfigError("max_bits must be positive");
    }
    if (max_bits < min_bit_errors) {
        throw ConfigError("max_bits must be at least min_bit_errors");
    }
}

double BerRecord::standard_error() const {
    if (bits_sent == 0) {
        return 0.0;
    }
    return std::sqrt(ber * (1.0 - ber) / static_cast<double>(bits_sent));
}

TrialOutcome simulate_trial(const Scenario& s, const Constellation& c, double snr_db, std::uint64_t seed,
                            std::uint64_t index, const BdnnModel* model, bool noiseless) {
    RandomStream rng(seed, index);
    const std::size_t nbits = rissm::bits_per_frame(s.nr, c, s.mode);
    Bits bits(nbits);
    std::uint64_t word = rng.bits();
    for (std::size_t k = 0; k < nbits; ++k) {
        bits[k] = static_cast<std::uint8_t>((word >> k) & 1u);
    }

    TrialOutcome out;
    out.sent = bits_to_frame(bits, s.nr, c, s.mode);
    const ChannelRealization ch = draw_channel(s, rng);
    const NoiseSpec noise = NoiseSpec::from_snr_db(snr_db);
    const std::complex<double> x = frame_symbol(out.sent, c, s.mode);

    DetectionResult det;
    if (s.detector == DetectorKind::GREEDY) {
        const EffectiveChannel h = effective_channel(ch, align_phases(ch, out.sent.antenna));
        det = greedy_detect(transmit(h, x, noise, rng, noiseless), ch, c, s.mode);
    } else {
        const ComplexMatrix hyp = hypothesis_channels(ch);
        const EffectiveChannel h{hyp.col(static_cast<Eigen::Index>(out.sent.antenna))};
        const ComplexVector y = transmit(h, x, noise, rng, noiseless);
        if (s.detector == DetectorKind::ML) {
            det = ml_detect(y, hyp, c, s.mode);
        } else {
            det = bdnn_detect(y, hyp, static_cast<double>(s.n), c, s.mode, s.feature_mode,
                              [model](const Eigen::MatrixXd& features) {
                                  return classify_blocks(model->params, features);
                              });
        }
    }
    out.detected = det.frame();
    out.bit_errors = count_bit_errors(out.sent, out.detected, s, c);
    return out;
}

BerRecord run_ber_point(const Scenario& s, double snr_db, const StoppingRule& stop, std::uint64_t seed,
                        const BdnnModel* model, const RunOptions& opts) {
    s.validate();
    stop.validate();
    if (s.detector == DetectorKind::BDNN && s.mode == Mode::SM) {
        if (model == nullptr) {
            throw ConfigError("B-DNN detection needs a trained model for " + s.fingerprint());
        }
        model->check_compatible(s);
    }
    const Constellation c = s.constellation();
    const std::uint64_t frame_bits = rissm::bits_per_frame(s.nr, c, s.mode);
    if (frame_bits == 0) {
        throw ConfigError("scenario carries no information bits (Nr=1 in SSK mode)");
    }
    const unsigned workers = std::max(1u, opts.workers == 0 ? std::thread::hardware_concurrency() : opts.workers);

    BerRecord rec;
    rec.snr_db = snr_db;
    rec.seed = seed;
    rec.fingerprint = s.fingerprint();

    std::vector<std::uint32_t> errors(kChunkTrials);
    std::uint64_t next = 0;
    bool done = false;
    while (!done) {
        const std::uint64_t first = next;
        auto work = [&](unsigned w) {
            for (std::uint64_t k = w; k < kChunkTrials; k += workers) {
                errors[k] = simulate_trial(s, c, snr_db, seed, first + k, model, opts.noiseless).bit_errors;
            }
        };
        if (workers == 1) {
            work(0);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < workers; ++w) {
                pool.emplace_back(work, w);
            }
        }
        for (std::uint64_t k = 0; k < kChunkTrials; ++k) {
            rec.bit_errors += errors[k];
            rec.bits_sent += frame_bits;
            ++rec.frames;
            if (rec.bit_errors >= stop.min_bit_errors || rec.bits_sent >= stop.max_bits) {
                done = true;
                break;
            }
        }
        next += kChunkTrials;
    }
    rec.ber = static_cast<double>(rec.bit_errors) / static_cast<double>(rec.bits_sent);
    return rec;
}

std::vector<BerRecord> sweep(const Scenario& s, const std::vector<double>& snrs_db, const StoppingRule& stop,
                             std::uint64_t master_seed, const BdnnModel* model, const RunOptions& opts) {
    if (snrs_db.empty()) {
        throw ConfigError("SNR sweep needs at least one point");
    }
    std::vector<BerRecord> out;
    out.reserve(snrs_db.size());
    for (std::size_t k = 0; k < snrs_db.size(); ++k) {
        out.push_back(run_ber_point(s, snrs_db[k], stop, mix_seed(master_seed, k), model, opts));
    }
    return out;
}

}  // namespace rissm
