#pragma once

// Block-DNN detector.
//
// For every receive-antenna hypothesis i the received vector y and the
// hypothesis channel h_i (RIS aligned to antenna i) are turned into a real
// feature vector of length 2(Nr + Nr). One shared classifier maps each
// block to a symbol estimate x_i; the antenna is then the hypothesis with
// the smallest residual |y - h_i x_i|^2.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "rissm/channel.hpp"
#include "rissm/detectors.hpp"
#include "rissm/mlp.hpp"
#include "rissm/scenario.hpp"

namespace rissm {

/// Interleaved (Re, Im) components of v, optionally taking |.| of each.
Eigen::VectorXd sfvg(const ComplexVector& v, FeatureMode mode);

/// [sfvg(y / scale), sfvg(h / scale)].
Eigen::VectorXd block_features(const ComplexVector& y, const ComplexVector& h, double scale, FeatureMode mode);

/// Hidden widths per scheme: BPSK 128-64-32, QPSK 256-128-64, QAM 512-256-128.
std::vector<std::size_t> hidden_layers(Scheme scheme);
/// [2(Nr + Nr), hidden..., M].
std::vector<std::size_t> network_layout(Scheme scheme, std::size_t order, std::size_t nr);
MlpParams build_network(Scheme scheme, std::size_t order, std::size_t nr, RandomStream& rng);

struct TrainingConfig {
    double learning_rate = 0.005;
    std::size_t epochs = 50;
    std::size_t batch_size = 64;
    std::size_t dataset_size = 200000;
    double snr_min_db = -40.0;
    double snr_max_db = 0.0;
    std::uint64_t seed = 1;
    FeatureMode feature_mode = FeatureMode::SIGNED;

    void validate() const;
};

struct LabeledExample {
    Eigen::VectorXd features;
    std::size_t label = 0;
};

/// Examples stored column-wise for batched training.
struct TrainingSet {
    Eigen::MatrixXd features;
    std::vector<std::size_t> labels;

    std::size_t size() const noexcept { return labels.size(); }
    LabeledExample example(std::size_t k) const;
};

/// Each example: uniform SNR in [snr_min, snr_max], fresh channel and random
/// frame, features built from the true-antenna hypothesis, label = symbol.
/// Example k draws from its own stream (seed, k).
TrainingSet generate_training_set(const Scenario& s, std::size_t size, double snr_min_db, double snr_max_db,
                                  std::uint64_t seed, bool noiseless = false);

/// One pass over `data` in shuffled mini-batches. Returns the mean per-example loss.
double sgd_epoch(MlpParams& p, const TrainingSet& data, const TrainingConfig& cfg, RandomStream& rng);

/// Everything needed to reuse a trained classifier.
struct BdnnModel {
    Scheme scheme = Scheme::QPSK;
    std::size_t order = 4;
    std::size_t nr = 4;
    std::size_t n = 64;
    FeatureMode feature_mode = FeatureMode::SIGNED;
    MlpParams params;

    /// Throws ConfigError if the model was not trained for `s`.
    void check_compatible(const Scenario& s) const;
};

/// Builds, trains and returns a model; `on_epoch(epoch, mean_loss)` is called after each epoch.
BdnnModel train_bdnn(const Scenario& s, const TrainingConfig& cfg,
                     const std::function<void(std::size_t, double)>& on_epoch = {});

/// Maps a d0 x K feature matrix to one symbol index per column.
using BlockClassifier = std::function<std::vector<std::size_t>(const Eigen::MatrixXd&)>;

/// Argmax of the network's softmax output per block (lowest index on ties).
std::vector<std::size_t> classify_blocks(const MlpParams& p, const Eigen::MatrixXd& features);

/// argmin_i |y - h_i x_i|^2 over hypotheses (columns of `hypotheses`); ties to the lowest i.
std::size_t select_by_residual(const ComplexVector& y, const ComplexMatrix& hypotheses,
                               std::span<const std::complex<double>> symbols, double* residual = nullptr);

DetectionResult bdnn_detect(const ComplexVector& y, const ComplexMatrix& hypotheses, double scale,
                            const Constellation& c, Mode mode, FeatureMode feature_mode,
                            const BlockClassifier& classify);

/// Full pipeline with the network; `scale` defaults to the reflector count N.
DetectionResult bdnn_detect(const ComplexVector& y, const ChannelRealization& channel, const MlpParams& p,
                            const Constellation& c, Mode mode, FeatureMode feature_mode);

}  // namespace rissm
