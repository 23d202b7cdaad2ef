#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "adact/activation.hpp"
#include "adact/tensor.hpp"

namespace adact {

/// Fully-connected layer. One trainable shape value per output unit when
/// the activation is adaptive; shape_a is empty otherwise. shape_a stores
/// the unconstrained a = ln(alpha).
struct DenseLayer {
    Tensor weights;  // [fan_in x fan_out]
    Tensor bias;     // [fan_out]
    ActivationKind activation = ActivationKind::Sigmoid;
    std::vector<double> shape_a;

    // forward cache
    Tensor in_cache;   // [b x fan_in]
    Tensor eta_cache;  // [b x fan_out], linear predictors
    Tensor out_cache;  // [b x fan_out]

    DenseLayer() = default;
    DenseLayer(std::size_t fan_in, std::size_t fan_out, ActivationKind act);

    std::size_t fan_in() const { return weights.dim(0); }
    std::size_t fan_out() const { return weights.dim(1); }
};

/// Valid cross-correlation, stride 1. One shape value per output channel,
/// shared across spatial positions the same way the kernel weights are.
struct Conv2DLayer {
    Tensor kernels;  // [out_ch x in_ch x kh x kw]
    Tensor bias;     // [out_ch]
    ActivationKind activation = ActivationKind::ReLU;
    std::vector<double> shape_a;

    Tensor in_cache;   // [b x in_ch x h x w]
    Tensor eta_cache;  // [b x out_ch x oh x ow]
    Tensor out_cache;

    Conv2DLayer() = default;
    Conv2DLayer(std::size_t out_ch, std::size_t in_ch, std::size_t kh, std::size_t kw,
                ActivationKind act);

    std::size_t out_channels() const { return kernels.dim(0); }
    std::size_t in_channels() const { return kernels.dim(1); }
};

/// 2x2 window, stride 2, spatial dims floor-halved. Ties go to the first
/// maximum in row-major scan order.
struct MaxPool2DLayer {
    std::vector<std::size_t> argmax_cache;  // flat index into the input per output element
    std::vector<std::size_t> in_shape_cache;
    std::vector<std::size_t> out_shape_cache;
};

/// [b x c x h x w] -> [b x c*h*w]; bridges the conv stack and dense layers.
struct FlattenLayer {
    std::vector<std::size_t> in_shape_cache;
};

using Layer = std::variant<DenseLayer, Conv2DLayer, MaxPool2DLayer, FlattenLayer>;

enum class OutputKind {
    BinaryLogistic,  // one logit -> probability of class 1
    SoftmaxK         // K logits -> probability vector
};

enum class BaseLoss { CrossEntropy, SquaredError };

struct LossSpec {
    BaseLoss base = BaseLoss::CrossEntropy;
    double l1 = 0.0;
    double l2 = 0.0;
    // Literal-reading ablation: include alpha in the L1/L2 penalties.
    bool penalize_alpha = false;
};

struct LayerGrads {
    Tensor d_weights;
    Tensor d_bias;
    std::vector<double> d_shape_a;  // gradient w.r.t. unconstrained a
    bool has_params = false;
};

struct Gradients {
    std::vector<LayerGrads> layers;
};

/// Ordered layer list plus the output transform applied to the last
/// layer's linear output. Forward/backward mutate per-layer caches, so a
/// Network is single-writer; clone for parallel read-only inference.
struct Network {
    std::vector<Layer> layers;
    OutputKind output = OutputKind::BinaryLogistic;

    std::size_t cached_batch = 0;  // 0 means no forward cache
    Tensor pred_cache;             // output-transformed predictions
};

/// Runs the batch through every layer, caching linear predictors and
/// outputs, then applies the output transform. Returns [b x 1]
/// probabilities for BinaryLogistic, [b x K] rows summing to 1 for
/// SoftmaxK.
Tensor forward(Network& net, const Tensor& batch);

/// Gradients of (summed batch loss + penalties) w.r.t. every weight,
/// bias, and unconstrained shape value a. The batch gradient is the sum
/// of per-sample gradients, so a step of size gamma moves by gamma times
/// the accumulated signal of the whole mini-batch. Requires a forward
/// cache for this batch. dL/da = dL/dalpha * e^a.
Gradients backward(Network& net, const Tensor& batch, const std::vector<int>& labels,
                   const LossSpec& loss);

/// Summed base loss over the batch plus l1 * sum|w| + l2 * sum w^2 over
/// weight matrices and kernels (biases excluded; alpha only when
/// penalize_alpha is set). Matches the gradients from backward().
double loss_value(const Tensor& predictions, const std::vector<int>& labels,
                  const LossSpec& loss, const Network& net);

/// Penalty term alone, from the network's current parameters.
double penalty_value(const LossSpec& loss, const Network& net);

enum class ParamClass { Weight, Bias, Alpha };

/// Visits every trainable scalar in layer order; used by the SGD step,
/// the gradient checker, and serialization.
void for_each_param(Network& net,
                    const std::function<void(double&, ParamClass, const std::string&)>& fn);

/// Same visitation order over a Gradients structure.
void for_each_grad(Gradients& grads,
                   const std::function<void(double&, ParamClass, const std::string&)>& fn);

std::size_t param_count(const Network& net);

/// Number of classes the network emits (2 for BinaryLogistic).
std::size_t output_classes(const Network& net);

/// Hard class labels from predicted probabilities (threshold 0.5 for
/// BinaryLogistic, row argmax for SoftmaxK).
std::vector<int> predict_labels(const Tensor& predictions, OutputKind output);

/// Fully-connected classifier: d inputs, `hidden` layers of `width` units
/// with the given activation, linear output head sized for `output`.
Network make_mlp(std::size_t d, std::size_t hidden, std::size_t width,
                 ActivationKind act, OutputKind output, std::size_t classes = 2);

}  // namespace adact
