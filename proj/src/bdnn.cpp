#include "rissm/bdnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rissm/errors.hpp"

namespace rissm {

Eigen::VectorXd sfvg(const ComplexVector& v, FeatureMode mode) {
    if (v.size() == 0) {
        throw ShapeError("cannot extract features from an empty vector");
    }
    Eigen::VectorXd out(2 * v.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        out(2 * k) = v(k).real();
        out(2 * k + 1) = v(k).imag();
    }
    if (mode == FeatureMode::ABSOLUTE) {
        out = out.cwiseAbs();
    }
    return out;
}

Eigen::VectorXd block_features(const ComplexVector& y, const ComplexVector& h, double scale, FeatureMode mode) {
    if (y.size() != h.size()) {
        throw ShapeError("received vector and channel differ in length (" + std::to_string(y.size()) + " vs " +
                         std::to_string(h.size()) + ")");
    }
    if (!(scale > 0.0)) {
        throw ParameterError("feature scale must be positive");
    }
    const double inv = 1.0 / scale;
    Eigen::VectorXd d(4 * y.size());
    d << sfvg(y * inv, mode), sfvg(h * inv, mode);
    return d;
}

std::vector<std::size_t> hidden_layers(Scheme scheme) {
    switch (scheme) {
        case Scheme::BPSK: return {128, 64, 32};
        case Scheme::QPSK: return {256, 128, 64};
        case Scheme::MQAM: return {512, 256, 128};
    }
    throw ConfigError("unsupported scheme");
}

std::vector<std::size_t> network_layout(Scheme scheme, std::size_t order, std::size_t nr) {
    (void)build_constellation(scheme, order);
    if (nr == 0) {
        throw ConfigError("Nr must be at least 1");
    }
    std::vector<std::size_t> sizes{2 * (nr + nr)};
    for (auto width : hidden_layers(scheme)) {
        sizes.push_back(width);
    }
    sizes.push_back(order);
    return sizes;
}

MlpParams build_network(Scheme scheme, std::size_t order, std::size_t nr, RandomStream& rng) {
    return init_mlp(network_layout(scheme, order, nr), rng);
}

void TrainingConfig::validate() const {
    if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (epochs == 0) throw ConfigError("epochs must be at least 1");
    if (batch_size == 0) throw ConfigError("batch size must be at least 1");
    if (dataset_size == 0) throw ConfigError("dataset size must be at least 1");
    if (!(snr_max_db >= snr_min_db)) throw ConfigError("training SNR range is empty");
}

LabeledExample TrainingSet::example(std::size_t k) const {
    return {features.col(static_cast<Eigen::Index>(k)), labels.at(k)};
}

TrainingSet generate_training_set(const Scenario& s, std::size_t size, double snr_min_db, double snr_max_db,
                                  std::uint64_t seed, bool noiseless) {
    s.validate();
    if (s.mode != Mode::SM) {
        throw ConfigError("the B-DNN classifier is only trained for SM scenarios");
    }
    const Constellation c = s.constellation();
    const auto d0 = static_cast<Eigen::Index>(4 * s.nr);
    TrainingSet set{Eigen::MatrixXd(d0, static_cast<Eigen::Index>(size)), std::vector<std::size_t>(size)};
    for (std::size_t k = 0; k < size; ++k) {
        RandomStream rng(seed, k);
        const double snr_db = snr_min_db + (snr_max_db - snr_min_db) * rng.uniform();
        const ChannelRealization ch = draw_channel(s, rng);
        const Frame f{static_cast<std::size_t>(rng.below(s.nr)), static_cast<std::size_t>(rng.below(c.order()))};
        const EffectiveChannel h = effective_channel(ch, align_phases(ch, f.antenna));
        const ComplexVector y = transmit(h, c.points[f.symbol], NoiseSpec::from_snr_db(snr_db), rng, noiseless);
        set.features.col(static_cast<Eigen::Index>(k)) =
            block_features(y, h.gains, static_cast<double>(s.n), s.feature_mode);
        set.labels[k] = f.symbol;
    }
    return set;
}

double sgd_epoch(MlpParams& p, const TrainingSet& data, const TrainingConfig& cfg, RandomStream& rng) {
    if (data.size() == 0) {
        throw ConfigError("cannot train on an empty dataset");
    }
    cfg.validate();
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t k = order.size(); k > 1; --k) {
        std::swap(order[k - 1], order[rng.below(k)]);
    }

    MlpGradients grad;
    Eigen::MatrixXd batch;
    std::vector<std::size_t> labels;
    double total = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
        const std::size_t count = std::min(cfg.batch_size, order.size() - start);
        batch.resize(data.features.rows(), static_cast<Eigen::Index>(count));
        labels.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            batch.col(static_cast<Eigen::Index>(k)) = data.features.col(static_cast<Eigen::Index>(order[start + k]));
            labels[k] = data.labels[order[start + k]];
        }
        total += mlp_backward_batch(p, batch, labels, grad) * static_cast<double>(count);
        sgd_step(p, grad, cfg.learning_rate);
    }
    return total / static_cast<double>(data.size());
}

void BdnnModel::check_compatible(const Scenario& s) const {
    if (s.mode != Mode::SM) {
        return;  // SSK blocks carry a fixed symbol; the classifier is never consulted
    }
    if (scheme != s.scheme || order != s.order || nr != s.nr || n != s.n || feature_mode != s.feature_mode) {
        throw ConfigError("B-DNN model (" + std::string(to_string(scheme)) + std::to_string(order) + ", Nr=" +
                          std::to_string(nr) + ", N=" + std::to_string(n) + ", " +
                          std::string(to_string(feature_mode)) + ") does not match scenario " + s.fingerprint());
    }
    if (params.input_size() != 4 * s.nr || params.output_size() != s.order) {
        throw ConfigError("B-DNN network shape does not match scenario " + s.fingerprint());
    }
}

BdnnModel train_bdnn(const Scenario& s, const TrainingConfig& cfg,
                     const std::function<void(std::size_t, double)>& on_epoch) {
    cfg.validate();
    Scenario scenario = s;
    scenario.feature_mode = cfg.feature_mode;
    scenario.validate();

    RandomStream init_rng(mix_seed(cfg.seed, 0), 0);
    RandomStream shuffle_rng(mix_seed(cfg.seed, 1), 0);
    BdnnModel model{scenario.scheme, scenario.order, scenario.nr, scenario.n, cfg.feature_mode,
                    build_network(scenario.scheme, scenario.order, scenario.nr, init_rng)};
    const TrainingSet data = generate_training_set(scenario, cfg.dataset_size, cfg.snr_min_db, cfg.snr_max_db,
                                                   mix_seed(cfg.seed, 2));
    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const double loss = sgd_epoch(model.params, data, cfg, shuffle_rng);
        if (on_epoch) {
            on_epoch(epoch + 1, loss);
        }
    }
    return model;
}

std::vector<std::size_t> classify_blocks(const MlpParams& p, const Eigen::MatrixXd& features) {
    const Eigen::MatrixXd probs = mlp_forward_batch(p, features);
    std::vector<std::size_t> out(static_cast<std::size_t>(probs.cols()));
    for (Eigen::Index c = 0; c < probs.cols(); ++c) {
        Eigen::Index best = 0;
        probs.col(c).maxCoeff(&best);  // first maximum
        out[static_cast<std::size_t>(c)] = static_cast<std::size_t>(best);
    }
    return out;
}

std::size_t select_by_residual(const ComplexVector& y, const ComplexMatrix& hypotheses,
                               std::span<const std::complex<double>> symbols, double* residual) {
    if (static_cast<std::size_t>(hypotheses.cols()) != symbols.size() || hypotheses.rows() != y.size()) {
        throw ShapeError("residual selection needs one symbol per hypothesis column of length |y|");
    }
    std::size_t best = 0;
    double best_r = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < symbols.size(); ++i) {
        const double r = (y - hypotheses.col(static_cast<Eigen::Index>(i)) * symbols[i]).squaredNorm();
        if (r < best_r) {
            best_r = r;
            best = i;
        }
    }
    if (residual != nullptr) {
        *residual = best_r;
    }
    return best;
}

DetectionResult bdnn_detect(const ComplexVector& y, const ComplexMatrix& hypotheses, double scale,
                            const Constellation& c, Mode mode, FeatureMode feature_mode,
                            const BlockClassifier& classify) {
    const Eigen::Index nr = hypotheses.rows();
    if (hypotheses.cols() != nr || y.size() != nr) {
        throw ShapeError("B-DNN detection needs |y| = Nr and an Nr x Nr hypothesis matrix");
    }
    std::vector<std::complex<double>> symbols(static_cast<std::size_t>(nr), kSskSymbol);
    std::vector<std::size_t> indices(static_cast<std::size_t>(nr), 0);
    if (mode == Mode::SM) {
        Eigen::MatrixXd features(4 * nr, nr);
        for (Eigen::Index i = 0; i < nr; ++i) {
            features.col(i) = block_features(y, hypotheses.col(i), scale, feature_mode);
        }
        indices = classify(features);
        if (indices.size() != static_cast<std::size_t>(nr)) {
            throw ShapeError("classifier must return one symbol per block");
        }
        for (std::size_t i = 0; i < indices.size(); ++i) {
            if (indices[i] >= c.order()) {
                throw IndexError("classifier returned symbol " + std::to_string(indices[i]));
            }
            symbols[i] = c.points[indices[i]];
        }
    }
    DetectionResult out;
    out.antenna = select_by_residual(y, hypotheses, symbols, &out.metric);
    out.symbol = indices[out.antenna];
    return out;
}

DetectionResult bdnn_detect(const ComplexVector& y, const ChannelRealization& channel, const MlpParams& p,
                            const Constellation& c, Mode mode, FeatureMode feature_mode) {
    if (static_cast<std::size_t>(y.size()) != channel.receive_antennas()) {
        throw ShapeError("received vector length does not match Nr");
    }
    if (mode == Mode::SM && p.input_size() != 4 * channel.receive_antennas()) {
        throw ShapeError("network input size " + std::to_string(p.input_size()) + " does not match 2(Nr+Nr)=" +
                         std::to_string(4 * channel.receive_antennas()));
    }
    return bdnn_detect(y, hypothesis_channels(channel), static_cast<double>(channel.reflectors()), c, mode,
                       feature_mode, [&p](const Eigen::MatrixXd& features) { return classify_blocks(p, features); });
}

}  // namespace rissm
