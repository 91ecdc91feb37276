#pragma once

// Fully connected classifier: ReLU hidden layers, softmax output,
// cross-entropy loss, plain mini-batch SGD. Batches are stored column-wise
// (one example per column).

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "rissm/rng.hpp"

namespace rissm {

struct MlpParams {
    std::vector<std::size_t> layer_sizes;  ///< [d0, d1, ..., dL]
    std::vector<Eigen::MatrixXd> weights;  ///< weights[l] is d(l+1) x d(l)
    std::vector<Eigen::VectorXd> biases;   ///< biases[l] has d(l+1) entries

    static MlpParams zeros(std::vector<std::size_t> sizes);

    std::size_t layers() const noexcept { return weights.size(); }
    std::size_t input_size() const noexcept { return layer_sizes.front(); }
    std::size_t output_size() const noexcept { return layer_sizes.back(); }
    std::size_t parameter_count() const noexcept;
    bool all_finite() const;
    /// Throws ShapeError if weights/biases disagree with layer_sizes.
    void validate() const;
};

/// Gradients share the parameter layout.
using MlpGradients = MlpParams;

/// He-normal weights (std sqrt(2/fan_in)), zero biases.
MlpParams init_mlp(std::vector<std::size_t> sizes, RandomStream& rng);

/// Column-wise softmax with max subtraction.
Eigen::MatrixXd softmax(const Eigen::MatrixXd& logits);

Eigen::VectorXd mlp_forward(const MlpParams& p, const Eigen::VectorXd& z0);
/// One output column per input column.
Eigen::MatrixXd mlp_forward_batch(const MlpParams& p, const Eigen::MatrixXd& inputs);

/// -log(max(probs[label], 1e-12)).
double cross_entropy_loss(const Eigen::VectorXd& probs, std::size_t label);

/// Analytic gradient of the loss for one example.
MlpGradients mlp_backward(const MlpParams& p, const Eigen::VectorXd& z0, std::size_t label);

/// Mean gradient over the batch written into `grad` (resized as needed);
/// returns the mean loss of the batch before any update.
double mlp_backward_batch(const MlpParams& p, const Eigen::MatrixXd& inputs, std::span<const std::size_t> labels,
                          MlpGradients& grad);

/// w <- w - lr * g for every parameter.
void sgd_step(MlpParams& p, const MlpGradients& grad, double lr);

}  // namespace rissm
