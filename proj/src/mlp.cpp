#include "rissm/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rissm/errors.hpp"

namespace rissm {

namespace {

constexpr double kProbabilityFloor = 1e-12;

void check_input(const MlpParams& p, Eigen::Index rows) {
    if (static_cast<std::size_t>(rows) != p.input_size()) {
        throw ShapeError("network expects " + std::to_string(p.input_size()) + " inputs, got " +
                         std::to_string(rows));
    }
}

void check_label(const MlpParams& p, std::size_t label) {
    if (label >= p.output_size()) {
        throw IndexError("label " + std::to_string(label) + " out of range for " +
                         std::to_string(p.output_size()) + " classes");
    }
}

}  // namespace

MlpParams MlpParams::zeros(std::vector<std::size_t> sizes) {
    if (sizes.size() < 2) {
        throw ShapeError("a network needs at least an input and an output layer");
    }
    MlpParams p;
    p.layer_sizes = std::move(sizes);
    for (std::size_t l = 0; l + 1 < p.layer_sizes.size(); ++l) {
        const auto rows = static_cast<Eigen::Index>(p.layer_sizes[l + 1]);
        const auto cols = static_cast<Eigen::Index>(p.layer_sizes[l]);
        if (rows == 0 || cols == 0) {
            throw ShapeError("layer sizes must be non-zero");
        }
        p.weights.push_back(Eigen::MatrixXd::Zero(rows, cols));
        p.biases.push_back(Eigen::VectorXd::Zero(rows));
    }
    return p;
}

std::size_t MlpParams::parameter_count() const noexcept {
    std::size_t count = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        count += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    }
    return count;
}

bool MlpParams::all_finite() const {
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (!weights[l].allFinite() || !biases[l].allFinite()) {
            return false;
        }
    }
    return true;
}

void MlpParams::validate() const {
    if (layer_sizes.size() < 2 || weights.size() + 1 != layer_sizes.size() || biases.size() != weights.size()) {
        throw ShapeError("inconsistent layer count");
    }
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (static_cast<std::size_t>(weights[l].rows()) != layer_sizes[l + 1] ||
            static_cast<std::size_t>(weights[l].cols()) != layer_sizes[l] ||
            static_cast<std::size_t>(biases[l].size()) != layer_sizes[l + 1]) {
            throw ShapeError("layer " + std::to_string(l) + " does not match the declared sizes");
        }
    }
}

MlpParams init_mlp(std::vector<std::size_t> sizes, RandomStream& rng) {
    MlpParams p = MlpParams::zeros(std::move(sizes));
    for (auto& w : p.weights) {
        const double stddev = std::sqrt(2.0 / static_cast<double>(w.cols()));
        // column-major fill order is part of the determinism contract
        for (Eigen::Index k = 0; k < w.size(); ++k) {
            w.data()[k] = stddev * rng.normal();
        }
    }
    return p;
}

Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits) {
    Eigen::MatrixXd out(logits.rows(), logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
        const double peak = logits.col(c).maxCoeff();
        out.col(c) = (logits.col(c).array() - peak).exp();
        out.col(c) /= out.col(c).sum();
    }
    return out;
}

Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& inputs) {
    check_input(p, inputs.rows());
    Eigen::MatrixXd a = inputs;
    for (std::size_t l = 0; l < p.layers(); ++l) {
        Eigen::MatrixXd z = p.weights[l] * a;
        z.colwise() += p.biases[l];
        if (l + 1 < p.layers()) {
            a = z.cwiseMax(0.0);
        } else {
            return softmax(z);
        }
    }
    return a;
}

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& z0) {
    return mlp_forward_batch(p, z0);
}

double cross_entropy_loss(const Eigen::VectorXd& probs, std::size_t label) {
    if (label >= static_cast<std::size_t>(probs.size())) {
        throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(probs.size()) +
                         " classes");
    }
    return -std::log(std::max(probs(static_cast<Eigen::Index>(label)), kProbabilityFloor));
}

double mlp_backward_batch(const MlpParams& p, const Eigen::MatrixXd& inputs, std::span<const std::size_t> labels,
                          MlpGradients& grad) {
    check_input(p, inputs.rows());
    if (static_cast<std::size_t>(inputs.cols()) != labels.size() || labels.empty()) {
        throw ShapeError("batch needs one label per input column");
    }
    const std::size_t depth = p.layers();
    const double inv_batch = 1.0 / static_cast<double>(labels.size());

    // activations[0] is the input, activations[l] the output of hidden layer l
    std::vector<Eigen::MatrixXd> activations;
    activations.reserve(depth);
    activations.push_back(inputs);
    Eigen::MatrixXd delta;
    for (std::size_t l = 0; l < depth; ++l) {
        Eigen::MatrixXd z = p.weights[l] * activations.back();
        z.colwise() += p.biases[l];
        if (l + 1 < depth) {
            activations.push_back(z.cwiseMax(0.0));
        } else {
            delta = softmax(z);
        }
    }

    double loss = 0.0;
    for (std::size_t c = 0; c < labels.size(); ++c) {
        check_label(p, labels[c]);
        const auto col = static_cast<Eigen::Index>(c);
        const auto row = static_cast<Eigen::Index>(labels[c]);
        loss -= std::log(std::max(delta(row, col), kProbabilityFloor));
        delta(row, col) -= 1.0;  // dL/dlogits = probs - onehot
    }
    delta *= inv_batch;

    if (grad.layer_sizes != p.layer_sizes) {
        grad = MlpParams::zeros(p.layer_sizes);
    }
    for (std::size_t l = depth; l-- > 0;) {
        grad.weights[l].noalias() = delta * activations[l].transpose();
        grad.biases[l] = delta.rowwise().sum();
        if (l > 0) {
            Eigen::MatrixXd upstream = p.weights[l].transpose() * delta;
            // ReLU'(z) = 1 where the activation is positive, 0 otherwise (including z = 0)
            delta = upstream.cwiseProduct((activations[l].array() > 0.0).cast<double>().matrix());
        }
    }
    return loss * inv_batch;
}

MlpGradients mlp_backward(const MlpParams& p, const Eigen::VectorXd& z0, std::size_t label) {
    MlpGradients grad;
    const std::size_t labels[] = {label};
    mlp_backward_batch(p, z0, labels, grad);
    return grad;
}

void sgd_step(MlpParams& p, const MlpGradients& grad, double lr) {
    for (std::size_t l = 0; l < p.layers(); ++l) {
        p.weights[l] -= lr * grad.weights[l];
        p.biases[l] -= lr * grad.biases[l];
    }
}

}  // namespace rissm
