#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "adact/data.hpp"
#include "adact/network.hpp"
#include "adact/rng.hpp"

namespace adact {

enum class InitScheme {
    LeCun,      // weights uniform on +-sqrt(3/fan_in), biases 0
    SimMixture  // weights from 0.5 N(1, 0.5) + 0.5 N(-1, 0.5), biases N(0, 0.5)
};

const char* to_string(InitScheme scheme);
InitScheme init_scheme_from_string(const std::string& name);

struct TrainConfig {
    double gamma = 0.01;                 // learning rate
    double gamma_alpha_multiplier = 1.0; // separate rate factor for shape updates
    double l1 = 0.0;
    double l2 = 0.0;
    std::size_t batch_size = 20;
    std::size_t epochs = 1;
    std::uint64_t seed = 0;
    InitScheme init = InitScheme::LeCun;
    bool shuffle_each_epoch = true;
    bool penalize_alpha = false;

    /// Throws ConfigError on any violated positivity constraint.
    void validate() const;

    LossSpec loss_spec(BaseLoss base = BaseLoss::CrossEntropy) const {
        return LossSpec{base, l1, l2, penalize_alpha};
    }
};

/// Draws all weights and biases from the scheme; shape values start at
/// a = 0 (alpha = 1, the sigmoid/SiLU anchor).
void init_network(Network& net, InitScheme scheme, Rng& rng);

/// One plain SGD step: p <- p - gamma * g, with the shape values stepped
/// at gamma * gamma_alpha_multiplier. Gradients w.r.t. a already carry
/// the e^a chain factor from backward().
void sgd_step(Network& net, const Gradients& grads, const TrainConfig& config);

struct LossCurve {
    std::vector<double> train;       // full-pass loss after each epoch
    std::vector<double> validation;  // empty when no validation set given
};

struct TrainResult {
    LossCurve curve;
};

/// Mini-batch SGD over the dataset. Deterministic given the seed; the
/// final short batch is kept. Throws NumericError naming epoch and batch
/// if the loss goes NaN.
TrainResult train(Network& net, const Dataset& train_set, const Dataset* validation,
                  const TrainConfig& config, BaseLoss base = BaseLoss::CrossEntropy);

/// Mean per-sample loss on a dataset plus the penalty term, evaluated
/// in fixed-size chunks.
double evaluate_loss(Network& net, const Dataset& ds, const LossSpec& loss);

/// Accuracy of hard predictions on a dataset.
double evaluate_accuracy(Network& net, const Dataset& ds);

struct GradCheckReport {
    struct ClassReport {
        double max_rel_err = 0.0;
        std::string worst_param;
        std::size_t count = 0;
    };
    ClassReport weights, biases, alphas;
    double max_rel_err = 0.0;
    std::string worst_param;
    double tolerance = 0.0;

    bool pass() const { return max_rel_err <= tolerance; }
};

/// Central-difference check of every parameter's analytic gradient
/// against (L(p+h) - L(p-h)) / 2h, reported per parameter class.
/// Relative error uses an absolute floor of 1e-5, the smallest gradient
/// magnitude a double-precision central difference can resolve to the
/// default tolerance.
GradCheckReport grad_check(Network& net, const Tensor& batch, const std::vector<int>& labels,
                           const LossSpec& loss, double h = 1e-5, double tol = 1e-5);

}  // namespace adact
