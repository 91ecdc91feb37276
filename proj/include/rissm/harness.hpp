#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rissm/bdnn.hpp"
#include "rissm/scenario.hpp"

namespace rissm {

struct StoppingRule {
    std::uint64_t min_bit_errors = 100;
    std::uint64_t max_bits = 10'000'000;

    void validate() const;
};

struct BerRecord {
    double snr_db = 0.0;
    std::uint64_t bits_sent = 0;
    std::uint64_t bit_errors = 0;
    double ber = 0.0;
    std::uint64_t frames = 0;
    std::uint64_t seed = 0;
    std::string fingerprint;

    /// sqrt(ber (1 - ber) / bits), the binomial standard error of the estimate.
    double standard_error() const;

    friend bool operator==(const BerRecord&, const BerRecord&) = default;
};

struct RunOptions {
    /// 0 picks std::thread::hardware_concurrency().
    unsigned workers = 0;
    /// Skip the noise term (diagnostics and tests).
    bool noiseless = false;
};

/// Outcome of a single simulated frame.
struct TrialOutcome {
    Frame sent;
    Frame detected;
    std::uint32_t bit_errors = 0;
};

/// Trial `index` of a point seeded with `seed`: bits -> frame -> channel -> aligned RIS -> y -> detect.
/// Uses only the stream (seed, index), so its outcome does not depend on scheduling.
TrialOutcome simulate_trial(const Scenario& s, const Constellation& c, double snr_db, std::uint64_t seed,
                            std::uint64_t index, const BdnnModel* model, bool noiseless = false);

/// Runs trials 0, 1, 2, ... until `min_bit_errors` is reached or `max_bits` bits have been sent.
/// The stop position is resolved in trial order, so the record does not depend on `workers`.
BerRecord run_ber_point(const Scenario& s, double snr_db, const StoppingRule& stop, std::uint64_t seed,
                        const BdnnModel* model = nullptr, const RunOptions& opts = {});

/// Point k uses seed mix_seed(master_seed, k).
std::vector<BerRecord> sweep(const Scenario& s, const std::vector<double>& snrs_db, const StoppingRule& stop,
                             std::uint64_t master_seed, const BdnnModel* model = nullptr,
                             const RunOptions& opts = {});

}  // namespace rissm
