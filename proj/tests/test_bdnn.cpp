#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "oracles.hpp"
#include "rissm/bdnn.hpp"
#include "rissm/errors.hpp"

using namespace rissm;

namespace {

Scenario bpsk_scenario(std::size_t nr = 2, std::size_t n = 8) {
    Scenario s;
    s.nr = nr;
    s.n = n;
    s.scheme = Scheme::BPSK;
    s.order = 2;
    s.detector = DetectorKind::BDNN;
    return s;
}

double training_accuracy(const MlpParams& p, const TrainingSet& data) {
    const auto decided = classify_blocks(p, data.features);
    std::size_t hits = 0;
    for (std::size_t k = 0; k < data.size(); ++k) {
        hits += decided[k] == data.labels[k] ? 1 : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(data.size());
}

// Block detection re-done by hand: per-hypothesis features, network argmax, residual argmin, in long double.
oracle::Decision naive_bdnn(const ComplexVector& y, const ChannelRealization& ch, const MlpParams& p,
                            const Constellation& c) {
    const std::size_t nr = ch.receive_antennas();
    const double scale = static_cast<double>(ch.reflectors());
    oracle::Decision best;
    long double best_r = std::numeric_limits<long double>::infinity();
    for (std::size_t i = 0; i < nr; ++i) {
        std::vector<oracle::cld> h(nr);
        Eigen::VectorXd d(4 * nr);
        for (std::size_t l = 0; l < nr; ++l) {
            h[l] = oracle::hypothesis_gain(ch, l, i);
            d(2 * l) = y(l).real() / scale;
            d(2 * l + 1) = y(l).imag() / scale;
            d(2 * nr + 2 * l) = static_cast<double>(h[l].real()) / scale;
            d(2 * nr + 2 * l + 1) = static_cast<double>(h[l].imag()) / scale;
        }
        Eigen::Index sym = 0;
        mlp_forward(p, d).maxCoeff(&sym);
        long double r = 0.0L;
        for (std::size_t l = 0; l < nr; ++l) {
            r += std::norm(oracle::cld(y(l)) - h[l] * oracle::cld(c.points[static_cast<std::size_t>(sym)]));
        }
        if (r < best_r) {
            best_r = r;
            best = {i, static_cast<std::size_t>(sym)};
        }
    }
    return best;
}

}  // namespace

TEST(Sfvg, WorkedExampleAbsolute) {
    ComplexVector v(1);
    v << std::complex<double>(1.0, -2.0);
    EXPECT_EQ(sfvg(v, FeatureMode::ABSOLUTE), Eigen::Vector2d(1.0, 2.0));
    EXPECT_EQ(sfvg(v, FeatureMode::SIGNED), Eigen::Vector2d(1.0, -2.0));
}

TEST(Sfvg, ZerosAndEmpty) {
    EXPECT_EQ(sfvg(ComplexVector::Zero(2), FeatureMode::SIGNED), Eigen::VectorXd::Zero(4));
    EXPECT_EQ(sfvg(ComplexVector::Zero(2), FeatureMode::ABSOLUTE), Eigen::VectorXd::Zero(4));
    EXPECT_THROW(sfvg(ComplexVector(0), FeatureMode::SIGNED), ShapeError);
}

TEST(BlockFeatures, LengthAndAssembly) {
    RandomStream rng(1, 0);
    ComplexVector y(4), h(4);
    for (Eigen::Index k = 0; k < 4; ++k) {
        y(k) = rng.complex_normal(1.0);
        h(k) = rng.complex_normal(1.0);
    }
    const auto d = block_features(y, h, 1.0, FeatureMode::SIGNED);
    ASSERT_EQ(d.size(), 16);
    for (Eigen::Index k = 0; k < 4; ++k) {
        EXPECT_EQ(d(2 * k), y(k).real());
        EXPECT_EQ(d(2 * k + 1), y(k).imag());
        EXPECT_EQ(d(8 + 2 * k), h(k).real());
        EXPECT_EQ(d(8 + 2 * k + 1), h(k).imag());
    }
    EXPECT_EQ(block_features(ComplexVector::Zero(4), ComplexVector::Zero(4), 64.0, FeatureMode::SIGNED),
              Eigen::VectorXd::Zero(16));
    const auto scaled = block_features(y, h, 4.0, FeatureMode::SIGNED);
    EXPECT_LT((scaled - d / 4.0).norm(), 1e-15);
    EXPECT_THROW(block_features(y, ComplexVector::Zero(3), 1.0, FeatureMode::SIGNED), ShapeError);
}

TEST(BuildNetwork, TableLayouts) {
    EXPECT_EQ(network_layout(Scheme::BPSK, 2, 4), (std::vector<std::size_t>{16, 128, 64, 32, 2}));
    EXPECT_EQ(network_layout(Scheme::QPSK, 4, 4), (std::vector<std::size_t>{16, 256, 128, 64, 4}));
    EXPECT_EQ(network_layout(Scheme::MQAM, 16, 2), (std::vector<std::size_t>{8, 512, 256, 128, 16}));
    for (std::size_t nr : {1, 2, 4, 8, 16}) {
        EXPECT_EQ(network_layout(Scheme::QPSK, 4, nr).front(), 2 * (nr + nr));
    }
    RandomStream rng(1, 0);
    const auto p = build_network(Scheme::QPSK, 4, 4, rng);
    EXPECT_EQ(p.layer_sizes, network_layout(Scheme::QPSK, 4, 4));
    EXPECT_TRUE(p.all_finite());
    EXPECT_THROW(network_layout(Scheme::MQAM, 8, 4), ConfigError);
}

TEST(TrainingSet, ShapesLabelsAndDeterminism) {
    const auto s = bpsk_scenario(4, 16);
    const auto a = generate_training_set(s, 10, -10.0, 0.0, 5);
    ASSERT_EQ(a.size(), 10u);
    EXPECT_EQ(a.features.rows(), 16);
    for (auto label : a.labels) {
        EXPECT_LT(label, 2u);
    }
    const auto b = generate_training_set(s, 10, -10.0, 0.0, 5);
    EXPECT_EQ(a.features, b.features);
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.example(3).features, a.features.col(3));
}

TEST(Training, SgdEpochDeterministic) {
    const auto s = bpsk_scenario();
    const auto data = generate_training_set(s, 500, -20.0, 0.0, 3);
    TrainingConfig cfg;
    RandomStream init_a(1, 0), init_b(1, 0);
    MlpParams a = build_network(Scheme::BPSK, 2, 2, init_a);
    MlpParams b = build_network(Scheme::BPSK, 2, 2, init_b);
    RandomStream sa(2, 0), sb(2, 0);
    for (int e = 0; e < 3; ++e) {
        EXPECT_EQ(sgd_epoch(a, data, cfg, sa), sgd_epoch(b, data, cfg, sb));
    }
    for (std::size_t l = 0; l < a.layers(); ++l) {
        EXPECT_EQ(a.weights[l], b.weights[l]);
        EXPECT_EQ(a.biases[l], b.biases[l]);
    }
}

TEST(Training, EmptyDataRejected) {
    MlpParams p = MlpParams::zeros({8, 2});
    RandomStream rng(1, 0);
    EXPECT_THROW(sgd_epoch(p, TrainingSet{}, TrainingConfig{}, rng), ConfigError);
}

TEST(Training, LossDecreasesOverFiftyEpochs) {
    Scenario s = bpsk_scenario(4, 32);
    TrainingConfig cfg;
    cfg.dataset_size = 10000;
    cfg.snr_min_db = -30.0;
    cfg.snr_max_db = -15.0;
    std::vector<double> losses;
    const auto model = train_bdnn(s, cfg, [&](std::size_t, double loss) { losses.push_back(loss); });
    ASSERT_EQ(losses.size(), 50u);
    EXPECT_LT(losses.back(), losses.front());
    EXPECT_TRUE(model.params.all_finite());
}

TEST(Training, NoiselessBpskIsSeparable) {
    const auto s = bpsk_scenario(2, 8);
    const auto data = generate_training_set(s, 4000, 0.0, 0.0, 9, true);
    TrainingConfig cfg;
    cfg.epochs = 20;
    RandomStream init(1, 0), shuffle(2, 0);
    MlpParams p = build_network(Scheme::BPSK, 2, 2, init);
    for (std::size_t e = 0; e < cfg.epochs; ++e) {
        sgd_epoch(p, data, cfg, shuffle);
    }
    EXPECT_GT(training_accuracy(p, data), 0.99);
}

TEST(BdnnDetect, OracleNetworkRecoversNoiselessFrames) {
    RandomStream rng(3, 0);
    const auto c = build_constellation(Scheme::QPSK, 4);
    for (int k = 0; k < 200; ++k) {
        const auto ch = sample_channel(4, 32, {1.2, 1.0}, rng);
        const Frame f{rng.below(4), rng.below(4)};
        const auto hyp = hypothesis_channels(ch);
        const auto y = transmit({hyp.col(static_cast<Eigen::Index>(f.antenna))}, c.points[f.symbol], {1.0, 1.0}, rng,
                                true);
        const auto truth = [&](const Eigen::MatrixXd& feats) {
            return std::vector<std::size_t>(static_cast<std::size_t>(feats.cols()), f.symbol);
        };
        const auto d = bdnn_detect(y, hyp, 32.0, c, Mode::SM, FeatureMode::SIGNED, truth);
        EXPECT_EQ(d.frame(), f);
        EXPECT_LT(d.metric, 1e-18);
    }
}

TEST(BdnnDetect, ResidualStagePicksSmallest) {
    // residuals 4 and 1 -> second hypothesis
    ComplexMatrix hyp = ComplexMatrix::Zero(1, 2);
    hyp(0, 0) = 0.0;
    hyp(0, 1) = 1.0;
    ComplexVector y(1);
    y << 2.0;
    const std::vector<std::complex<double>> symbols{1.0, 1.0};
    double r = 0.0;
    EXPECT_EQ(select_by_residual(y, hyp, symbols, &r), 1u);
    EXPECT_DOUBLE_EQ(r, 1.0);
}

TEST(BdnnDetect, SskSkipsNetworkAndMatchesMl) {
    RandomStream rng(4, 0);
    const Constellation none{Scheme::BPSK, {kSskSymbol}, {0}};
    const MlpParams unused = MlpParams::zeros({1, 1});
    for (int k = 0; k < 500; ++k) {
        const auto ch = sample_channel(4, 16, {1.2, 1.0}, rng);
        const std::size_t m = rng.below(4);
        const auto y = transmit(effective_channel(ch, align_phases(ch, m)), kSskSymbol, {30.0, 1.0}, rng);
        const auto d = bdnn_detect(y, ch, unused, none, Mode::SSK, FeatureMode::SIGNED);
        EXPECT_EQ(d.antenna, ml_detect(y, ch, none, Mode::SSK).antenna);
    }
}

TEST(BdnnDetect, MatchesNaivePipeline) {
    RandomStream rng(5, 0);
    const auto c = build_constellation(Scheme::QPSK, 4);
    RandomStream init(6, 0);
    const MlpParams p = build_network(Scheme::QPSK, 4, 4, init);
    for (int k = 0; k < 1000; ++k) {
        const auto ch = sample_channel(4, 16, {1.2, 1.0}, rng);
        const Frame f{rng.below(4), rng.below(4)};
        const auto y = transmit(effective_channel(ch, align_phases(ch, f.antenna)), c.points[f.symbol], {20.0, 1.0},
                                rng);
        const auto d = bdnn_detect(y, ch, p, c, Mode::SM, FeatureMode::SIGNED);
        const auto ref = naive_bdnn(y, ch, p, c);
        ASSERT_EQ(d.antenna, ref.antenna) << k;
        ASSERT_EQ(d.symbol, ref.symbol) << k;
    }
}

TEST(BdnnDetect, HypothesisOrderDoesNotChangeDecision) {
    RandomStream rng(7, 0);
    const auto c = build_constellation(Scheme::QPSK, 4);
    RandomStream init(8, 0);
    const MlpParams p = build_network(Scheme::QPSK, 4, 4, init);
    const auto classify = [&p](const Eigen::MatrixXd& f) { return classify_blocks(p, f); };
    for (int k = 0; k < 300; ++k) {
        const auto ch = sample_channel(4, 16, {1.2, 1.0}, rng);
        const Frame f{rng.below(4), rng.below(4)};
        const auto hyp = hypothesis_channels(ch);
        const auto y = transmit({hyp.col(static_cast<Eigen::Index>(f.antenna))}, c.points[f.symbol], {10.0, 1.0}, rng);
        const auto base = bdnn_detect(y, hyp, 16.0, c, Mode::SM, FeatureMode::SIGNED, classify);

        std::vector<Eigen::Index> perm{0, 1, 2, 3};
        std::rotate(perm.begin(), perm.begin() + 1 + k % 3, perm.end());
        ComplexMatrix shuffled(4, 4);
        for (Eigen::Index i = 0; i < 4; ++i) {
            shuffled.col(i) = hyp.col(perm[static_cast<std::size_t>(i)]);
        }
        const auto d = bdnn_detect(y, shuffled, 16.0, c, Mode::SM, FeatureMode::SIGNED, classify);
        EXPECT_EQ(static_cast<std::size_t>(perm[d.antenna]), base.antenna);
        EXPECT_EQ(d.symbol, base.symbol);
        EXPECT_EQ(d.metric, base.metric);
    }
}

TEST(BdnnDetect, ShapeChecks) {
    RandomStream rng(9, 0);
    const auto ch = sample_channel(4, 8, {1.2, 1.0}, rng);
    const auto c = build_constellation(Scheme::QPSK, 4);
    RandomStream init(1, 0);
    const auto p = build_network(Scheme::QPSK, 4, 2, init);
    EXPECT_THROW(bdnn_detect(ComplexVector::Zero(4), ch, p, c, Mode::SM, FeatureMode::SIGNED), ShapeError);
    EXPECT_THROW(bdnn_detect(ComplexVector::Zero(3), ch, p, c, Mode::SM, FeatureMode::SIGNED), ShapeError);
}

TEST(BdnnModel, CompatibilityCheck) {
    Scenario s;
    s.nr = 4;
    s.n = 64;
    BdnnModel m{Scheme::QPSK, 4, 4, 64, FeatureMode::SIGNED, MlpParams::zeros(network_layout(Scheme::QPSK, 4, 4))};
    EXPECT_NO_THROW(m.check_compatible(s));
    s.n = 32;
    EXPECT_THROW(m.check_compatible(s), ConfigError);
    s.n = 64;
    s.feature_mode = FeatureMode::ABSOLUTE;
    EXPECT_THROW(m.check_compatible(s), ConfigError);
}
